use serde::{Deserialize, Serialize};

/// A rescaled value plus what happened on the way.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaled {
    pub value: f64,
    /// `min == max`; the value is 0.5 (minmax) or `min` (denorm).
    pub degenerate: bool,
    /// The input lay outside the domain and was clipped.
    pub clipped: bool,
}

/// `(value - min) / (max - min)`, clipped to [0, 1].
pub fn minmax(value: f64, min: f64, max: f64) -> Scaled {
    if max <= min {
        return Scaled {
            value: 0.5,
            degenerate: true,
            clipped: value != min,
        };
    }
    let u = (value - min) / (max - min);
    Scaled {
        value: u.clamp(0.0, 1.0),
        degenerate: false,
        clipped: !(0.0..=1.0).contains(&u),
    }
}

/// Inverse of [`minmax`]; `u` is clipped to [0, 1] first.
pub fn denorm(u: f64, min: f64, max: f64) -> Scaled {
    let c = u.clamp(0.0, 1.0);
    Scaled {
        value: if max <= min { min } else { min + c * (max - min) },
        degenerate: max <= min,
        clipped: c != u,
    }
}

/// Rounds halves away from negative infinity: 2.5 → 3, -2.5 → -2.
pub fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}
