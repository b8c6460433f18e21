use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::Submission;

/// One JSON document per submission in a directory. Writes go to a
/// temporary file that is renamed over the old document.
#[derive(Debug, Clone)]
pub struct Store {
    dir: PathBuf,
}

impl Store {
    pub fn open(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    pub fn save(&self, sub: &Submission) -> std::io::Result<()> {
        let tmp = self.dir.join(format!(".{}.json.tmp", sub.id));
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&serde_json::to_vec_pretty(sub).expect("submission serializes"))?;
        f.sync_all()?;
        fs::rename(&tmp, self.path(&sub.id))
    }

    /// Every stored submission; unreadable documents are logged and skipped.
    pub fn load_all(&self) -> std::io::Result<Vec<Submission>> {
        let mut out = Vec::new();
        for entry in fs::read_dir(&self.dir)? {
            let path = entry?.path();
            let is_doc = path.extension().is_some_and(|e| e == "json")
                && !path.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with('.'));
            if !is_doc {
                continue;
            }
            match fs::read(&path).map(|b| serde_json::from_slice::<Submission>(&b)) {
                Ok(Ok(s)) => out.push(s),
                Ok(Err(e)) => log::error!("skipping {}: {e}", path.display()),
                Err(e) => log::error!("skipping {}: {e}", path.display()),
            }
        }
        out.sort_by(|a, b| (a.created_at, &a.id).cmp(&(b.created_at, &b.id)));
        Ok(out)
    }
}
