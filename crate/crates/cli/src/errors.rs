//! Error-to-exit-code mapping: 0 success, 1 usage, 2 data, 3 internal.

use std::fmt;

#[derive(Debug)]
pub enum AppError {
    Usage(String),
    Data(String),
    Internal(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 1,
            AppError::Data(_) => 2,
            AppError::Internal(_) => 3,
        }
    }

    pub fn data(err: impl fmt::Display) -> Self {
        AppError::Data(err.to_string())
    }

    pub fn internal(err: impl fmt::Display) -> Self {
        AppError::Internal(err.to_string())
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Usage(m) => write!(f, "usage error: {m}"),
            AppError::Data(m) => write!(f, "data error: {m}"),
            AppError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;
