//! Machine-readable diagnostics written to stderr on failure.

use grn_core::GrnError;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Serialize)]
pub struct Diagnostic {
    pub error: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
    #[serde(skip)]
    pub exit_code: i32,
}

pub type CliResult<T> = Result<T, Diagnostic>;

impl Diagnostic {
    pub fn new(error: &'static str, message: impl Into<String>) -> Self {
        Self {
            error,
            message: message.into(),
            location: None,
            details: None,
            exit_code: 2,
        }
    }

    pub fn at(mut self, location: Value) -> Self {
        self.location = Some(location);
        self
    }

    /// Attaches the input file, keeping any line/column already present.
    pub fn in_file(mut self, file: &str) -> Self {
        match &mut self.location {
            Some(Value::Object(map)) => {
                map.insert("file".into(), json!(file));
            }
            _ => self.location = Some(json!({ "file": file })),
        }
        self
    }

    pub fn from_clap(e: &clap::Error) -> Self {
        use clap::error::ContextKind;
        let rendered = e.render().to_string();
        let message = rendered
            .lines()
            .next()
            .unwrap_or_default()
            .trim_start_matches("error: ")
            .to_string();
        let mut d = Diagnostic::new("usage", message);
        if let Some(arg) = e.get(ContextKind::InvalidArg).or_else(|| e.get(ContextKind::InvalidSubcommand)) {
            d = d.at(json!({ "argument": arg.to_string() }));
        }
        d
    }
}

impl From<GrnError> for Diagnostic {
    fn from(e: GrnError) -> Self {
        let message = e.to_string();
        match e {
            GrnError::Json(j) => {
                let kind = match j.classify() {
                    serde_json::error::Category::Data => "invalid_document",
                    serde_json::error::Category::Io => "io",
                    _ => "malformed_json",
                };
                Diagnostic::new(kind, message).at(json!({ "line": j.line(), "column": j.column() }))
            }
            GrnError::InvalidNetwork(violations) => {
                let mut d = Diagnostic::new("constraint_violation", message);
                d.details = Some(json!(violations));
                d
            }
            GrnError::NotSynchrony { witnesses, .. } => {
                let mut d = Diagnostic::new("not_synchrony", message);
                d.details = Some(json!(witnesses));
                d
            }
            GrnError::InvalidPartition(_) => Diagnostic::new("invalid_partition", message),
            GrnError::DimensionMismatch { .. } => Diagnostic::new("dimension_mismatch", message),
            GrnError::SizeCap { .. } => Diagnostic::new("size_cap", message),
            GrnError::Domain(_) => Diagnostic::new("domain", message),
            GrnError::Constraint(_) => Diagnostic::new("constraint_violation", message),
            GrnError::Config(_) => Diagnostic::new("invalid_config", message),
            GrnError::Format(_) => Diagnostic::new("invalid_document", message),
            GrnError::Io(_) => Diagnostic::new("io", message),
            GrnError::NonFinite { .. } => Diagnostic {
                exit_code: 1,
                ..Diagnostic::new("non_finite", message)
            },
        }
    }
}

impl From<std::io::Error> for Diagnostic {
    fn from(e: std::io::Error) -> Self {
        Diagnostic::new("io", e.to_string())
    }
}

impl From<serde_json::Error> for Diagnostic {
    fn from(e: serde_json::Error) -> Self {
        GrnError::Json(e).into()
    }
}
