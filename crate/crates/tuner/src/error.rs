use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use mangahue::{Error, ParamError};
use serde_json::json;

/// An error response: status plus a JSON body `{"error": ..}`, extended
/// with `field` and `permissible` for out-of-range parameters.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
    pub param: Option<ParamError>,
}

impl ApiError {
    pub fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
            param: None,
        }
    }

    pub fn not_found(what: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, what)
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    pub fn unprocessable(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, message)
    }
}

impl From<ParamError> for ApiError {
    fn from(e: ParamError) -> Self {
        Self {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            message: e.to_string(),
            param: Some(e),
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Param { source, .. } => {
                return Self {
                    param: Some(source.clone()),
                    ..Self::unprocessable(e.to_string())
                }
            }
            Error::DimensionMismatch { .. } => StatusCode::CONFLICT,
            Error::StrokeOutOfBounds { .. } | Error::StrokeWidth => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            Error::Decode(_) | Error::Json { .. } | Error::InvalidRaster(_) => {
                StatusCode::BAD_REQUEST
            }
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        Self::new(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.message });
        if let Some(p) = &self.param {
            body["field"] = json!(p.field);
            body["value"] = json!(p.value);
            body["permissible"] = json!(p.permissible);
        }
        (self.status, Json(body)).into_response()
    }
}
