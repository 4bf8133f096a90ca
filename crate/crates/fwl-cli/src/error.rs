//! Error split along the exit-code contract: configuration problems exit
//! 2 with a field-path message, numerical failures exit 3 with a
//! machine-readable JSON object on stderr.

use fwl_core::cylinder::CylinderError;
use fwl_core::groups::GroupsError;
use fwl_core::limitset::LimitSetError;
use fwl_core::zeta::ZetaError;

#[derive(Debug)]
pub enum CliError {
    /// bad config/flags/file system; exit code 2
    Config(String),
    /// the computation itself failed; exit code 3
    Numerical { kind: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { .. } => 3,
        }
    }

    /// stderr payload: plain text for config errors, JSON for numerical
    /// ones so harnesses can parse the failure.
    pub fn stderr_payload(&self) -> String {
        match self {
            CliError::Config(msg) => format!("config error: {msg}"),
            CliError::Numerical { kind, message } => serde_json::json!({
                "error": "numerical",
                "kind": kind,
                "message": message,
            })
            .to_string(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Numerical { kind, message } => {
                write!(f, "numerical failure ({kind}): {message}")
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("io: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(format!("json: {e}"))
    }
}

impl From<ZetaError> for CliError {
    fn from(e: ZetaError) -> Self {
        let kind = match &e {
            ZetaError::InvalidInput(msg) => return CliError::Config(msg.clone()),
            ZetaError::NonHyperbolic => "non_hyperbolic",
            ZetaError::LogSingular => "log_singular",
            ZetaError::ContourTooClose => "contour_proximity",
            ZetaError::NewtonDiverged { .. } => "newton_divergence",
            ZetaError::NoRealZero => "no_real_zero",
        };
        CliError::Numerical {
            kind: kind.into(),
            message: e.to_string(),
        }
    }
}

impl From<GroupsError> for CliError {
    fn from(e: GroupsError) -> Self {
        CliError::Config(format!("group: {e}"))
    }
}

impl From<LimitSetError> for CliError {
    fn from(e: LimitSetError) -> Self {
        match &e {
            LimitSetError::DegenerateGroup | LimitSetError::InsufficientScaleRange => {
                CliError::Numerical {
                    kind: "limit_set".into(),
                    message: e.to_string(),
                }
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<CylinderError> for CliError {
    fn from(e: CylinderError) -> Self {
        CliError::Config(e.to_string())
    }
}
