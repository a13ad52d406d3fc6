use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use thiserror::Error;

use crate::protocol::{ErrorBody, ErrorCode};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ServiceError {
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("initial psyche {0} is outside [-100, 100]")]
    InvalidPsyche(f64),
    #[error("{0:?} is not a UCI move")]
    MalformedMove(String),
    #[error("{0} is not legal in this position")]
    IllegalMove(String),
    #[error("it is the agent's turn")]
    NotYourTurn,
    #[error("the game is over")]
    GameOver,
    #[error("no session {0}")]
    NotFound(u64),
}

impl ServiceError {
    pub fn code(&self) -> ErrorCode {
        match self {
            ServiceError::BadRequest(_) => ErrorCode::BadRequest,
            ServiceError::UnknownPreset(_) => ErrorCode::UnknownPreset,
            ServiceError::InvalidPsyche(_) => ErrorCode::InvalidPsyche,
            ServiceError::MalformedMove(_) => ErrorCode::MalformedMove,
            ServiceError::IllegalMove(_) => ErrorCode::IllegalMove,
            ServiceError::NotYourTurn => ErrorCode::NotYourTurn,
            ServiceError::GameOver => ErrorCode::GameOver,
            ServiceError::NotFound(_) => ErrorCode::NotFound,
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::NotYourTurn | ServiceError::GameOver => StatusCode::CONFLICT,
            ServiceError::IllegalMove(_) | ServiceError::MalformedMove(_) => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            _ => StatusCode::BAD_REQUEST,
        }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            code: self.code(),
            message: self.to_string(),
        };
        (self.status(), Json(body)).into_response()
    }
}
