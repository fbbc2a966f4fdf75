use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::diag::{CliResult, Diagnostic};

/// Writes `text` to `out`, or to stdout.
pub fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Diagnostic::from(e).in_file(&path.display().to_string())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> CliResult<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

pub fn emit_json<T: Serialize + ?Sized>(out: Option<&Path>, value: &T) -> CliResult<()> {
    emit(out, &to_json(value)?)
}
