use std::net::SocketAddr;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use super::{ReviewRecord, Role, Service, ServiceError, Status};

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<Status>,
}

pub enum ApiError {
    Service(ServiceError),
    BadRequest(String),
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        ApiError::Service(e)
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::BadRequest(e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (http, body) = match self {
            ApiError::BadRequest(message) => (
                StatusCode::BAD_REQUEST,
                ErrorBody {
                    code: "BadRequest".into(),
                    message,
                    status: None,
                },
            ),
            ApiError::Service(e) => {
                let http = match &e {
                    ServiceError::EmptyText | ServiceError::UnknownPrompt(_) | ServiceError::InvalidReview(_) => StatusCode::BAD_REQUEST,
                    ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
                    ServiceError::NotYetAvailable(_) | ServiceError::NotProcessed(_) | ServiceError::AlreadyReleased => StatusCode::CONFLICT,
                    ServiceError::ReviewDisabled => StatusCode::FORBIDDEN,
                    ServiceError::Storage(_) | ServiceError::Config(_) => StatusCode::INTERNAL_SERVER_ERROR,
                };
                let status = match &e {
                    ServiceError::NotYetAvailable(s) | ServiceError::NotProcessed(s) => Some(*s),
                    _ => None,
                };
                (
                    http,
                    ErrorBody {
                        code: e.code().into(),
                        message: e.to_string(),
                        status,
                    },
                )
            }
        };
        (http, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Debug, Serialize, Deserialize)]
pub struct SubmitRequest {
    pub learner_id: String,
    pub prompt_id: u8,
    pub text: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ResubmitRequest {
    pub text: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SubmitResponse {
    pub id: String,
    pub status: Status,
}

#[derive(Debug, Deserialize)]
struct RoleQuery {
    #[serde(default)]
    role: Role,
}

async fn submit(State(svc): State<Service>, body: Result<Json<SubmitRequest>, JsonRejection>) -> Result<(StatusCode, Json<SubmitResponse>), ApiError> {
    let Json(req) = body?;
    let sub = svc.submit(&req.learner_id, req.prompt_id, &req.text)?;
    Ok((StatusCode::CREATED, Json(SubmitResponse { id: sub.id, status: sub.status })))
}

async fn resubmit(State(svc): State<Service>, Path(id): Path<String>, body: Result<Json<ResubmitRequest>, JsonRejection>) -> ApiResult<SubmitResponse> {
    let Json(req) = body?;
    let sub = svc.resubmit(&id, &req.text)?;
    Ok(Json(SubmitResponse { id: sub.id, status: sub.status }))
}

async fn status(State(svc): State<Service>, Path(id): Path<String>) -> ApiResult<super::SubmissionStatus> {
    Ok(Json(svc.status(&id)?))
}

async fn feedback(State(svc): State<Service>, Path(id): Path<String>, Query(q): Query<RoleQuery>) -> ApiResult<super::FeedbackDocument> {
    Ok(Json(svc.get_feedback(&id, q.role)?))
}

async fn queue(State(svc): State<Service>) -> ApiResult<Vec<super::SubmissionStatus>> {
    Ok(Json(svc.review_queue()?))
}

async fn review(State(svc): State<Service>, Path(id): Path<String>, body: Result<Json<ReviewRecord>, JsonRejection>) -> ApiResult<super::FeedbackDocument> {
    let Json(record) = body?;
    Ok(Json(svc.review(&id, record)?))
}

pub fn router(service: Service) -> Router {
    Router::new()
        .route("/api/submissions", post(submit))
        .route("/api/submissions/{id}", get(status))
        .route("/api/submissions/{id}/feedback", get(feedback))
        .route("/api/submissions/{id}/resubmit", post(resubmit))
        .route("/api/review/queue", get(queue))
        .route("/api/review/{id}", post(review))
        .with_state(service)
}

/// Serves the API on `addr` until `shutdown` resolves.
pub async fn serve<F>(service: Service, addr: SocketAddr, shutdown: F) -> std::io::Result<()>
where
    F: std::future::Future<Output = ()> + Send + 'static,
{
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    serve_on(service, listener, shutdown).await
}

pub async fn serve_on<F>(service: Service, listener: tokio::net::TcpListener, shutdown: F) -> std::io::Result<()>
where
    F: std::future::Future<Output = ()> + Send + 'static,
{
    axum::serve(listener, router(service)).with_graceful_shutdown(shutdown).await
}
