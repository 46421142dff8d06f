use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use maxsurf::Error;
use serde::Serialize;
use serde_json::Value;

/// Variable naming the directory for outputs written without `--out`.
pub const OUT_DIR_VAR: &str = "MAXSURF_OUT_DIR";

#[derive(Debug, Serialize)]
pub struct ErrorInfo {
    pub kind: &'static str,
    pub message: String,
}

/// JSON document written by every `check` and `classify` run.
#[derive(Debug, Serialize)]
pub struct Envelope<'a> {
    pub check: &'a str,
    pub surface: &'a str,
    pub pass: bool,
    pub report: Option<Value>,
    pub error: Option<ErrorInfo>,
}

/// Errors caused by the command line or the surface file rather than by
/// the numerics.
pub fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Parse(_) | Error::InvalidDomain(_) | Error::InvalidArgument(_) | Error::UnknownSurface(_)
    )
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse(_) => "Parse",
        Error::Eval(_) => "Eval",
        Error::UnitCircle(_) => "UnitCircle",
        Error::InvalidDomain(_) => "InvalidDomain",
        Error::InvalidArgument(_) => "InvalidArgument",
        Error::SpacelikeViolation { .. } => "SpacelikeViolation",
        Error::DegeneratePhi(_) => "DegeneratePhi",
        Error::NonExactRealPart { .. } => "NonExactRealPart",
        Error::NotExact { .. } => "NotExact",
        Error::Quadrature { .. } => "Quadrature",
        Error::DegenerateFrame { .. } => "DegenerateFrame",
        Error::Inconclusive(_) => "Inconclusive",
        Error::MaskEmpty => "MaskEmpty",
        Error::StencilCrossesMask => "StencilCrossesMask",
        Error::NoConvergence { .. } => "NoConvergence",
        Error::GraphExtraction(_) => "GraphExtraction",
        Error::Precondition(_) => "Precondition",
        Error::UnknownSurface(_) => "UnknownSurface",
    }
}

pub fn default_path(file_name: &str) -> PathBuf {
    match std::env::var_os(OUT_DIR_VAR) {
        Some(dir) if !dir.is_empty() => Path::new(&dir).join(file_name),
        _ => PathBuf::from(file_name),
    }
}

/// Writes to `out`, or to stdout when it is `None`.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn to_csv<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
