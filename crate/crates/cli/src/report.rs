use std::collections::BTreeMap;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use bh_core::counting::CountingError;
use bh_core::elliptic::EllipticError;
use bh_core::heights::HeightError;
use bh_core::intersection::IntersectionError;
use bh_core::siegel::SiegelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Budget(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Numeric(_) => "numeric",
            CliError::Budget(_) => "budget",
            CliError::Io(_) => "io",
        }
    }
}

impl From<SiegelError> for CliError {
    fn from(e: SiegelError) -> Self {
        match e {
            SiegelError::SingularY { .. }
            | SiegelError::DimensionMismatch { .. }
            | SiegelError::BadPolarization(_)
            | SiegelError::InvalidArgument(_) => CliError::Validation(e.to_string()),
            SiegelError::DegenerateDirection | SiegelError::BranchJump { .. } | SiegelError::Chart(_) => {
                CliError::Numeric(e.to_string())
            }
        }
    }
}

impl From<EllipticError> for CliError {
    fn from(e: EllipticError) -> Self {
        match e {
            EllipticError::Siegel(s) => s.into(),
            EllipticError::Singular
            | EllipticError::NotOnCurve
            | EllipticError::BranchCut(_)
            | EllipticError::UnknownSection(_) => CliError::Validation(e.to_string()),
            EllipticError::NoConvergence(_)
            | EllipticError::NearPole
            | EllipticError::AtInfinity
            | EllipticError::DegenerateLattice => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<HeightError> for CliError {
    fn from(e: HeightError) -> Self {
        match e {
            HeightError::Elliptic(inner) => inner.into(),
            HeightError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            HeightError::NoConvergence { .. } | HeightError::ParanoiaFailed { .. } => CliError::Numeric(e.to_string()),
            HeightError::ZeroPoint
            | HeightError::TwoTorsion
            | HeightError::NotOnCurve
            | HeightError::MissingC2(_)
            | HeightError::InvalidArgument(_) => CliError::Validation(e.to_string()),
        }
    }
}

impl From<CountingError> for CliError {
    fn from(e: CountingError) -> Self {
        match e {
            CountingError::Height(inner) => inner.into(),
            CountingError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<IntersectionError> for CliError {
    fn from(e: IntersectionError) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEntry {
    pub value: Value,
    /// `command_line`, `config_file`, `environment` or `default`.
    pub source: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorObject {
    pub kind: &'static str,
    pub exit_code: i32,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub seed: u64,
    pub format: Format,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub config: BTreeMap<String, ConfigEntry>,
    pub results: Value,
    pub errors: Vec<ErrorObject>,
    pub meta: Meta,
}

impl Report {
    pub fn render(&self) -> String {
        match self.meta.format {
            Format::Json => serde_json::to_string_pretty(self).expect("report values are serializable") + "\n",
            Format::Csv => self.render_csv(),
            Format::Text => self.render_text(),
        }
    }

    fn render_csv(&self) -> String {
        let mut rows = Vec::new();
        flatten("", &self.results, &mut rows);
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["key", "value"]).expect("in-memory write");
        for (k, v) in &rows {
            w.write_record([k, v]).expect("in-memory write");
        }
        for e in &self.errors {
            w.write_record([format!("error.{}", e.kind), e.message.clone()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }

    fn render_text(&self) -> String {
        let mut out = format!("{} ({} {})\n", self.command, self.meta.tool, self.meta.version);
        for (k, e) in &self.config {
            out += &format!("  config {k} = {} [{}]\n", scalar(&e.value), e.source);
        }
        let mut rows = Vec::new();
        flatten("", &self.results, &mut rows);
        for (k, v) in rows {
            out += &format!("{k}: {v}\n");
        }
        for e in &self.errors {
            out += &format!("error ({}): {}\n", e.kind, e.message);
        }
        out
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "null".into(),
        other => other.to_string(),
    }
}

/// Dotted-path rows for every leaf of a JSON value.
pub fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push((prefix.to_string(), "[]".into()));
            }
            for (i, x) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), x, out);
            }
        }
        leaf => out.push((prefix.to_string(), scalar(leaf))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flatten_paths() {
        let mut rows = Vec::new();
        flatten("", &json!({"a": {"b": [1, 2]}, "c": "x", "d": []}), &mut rows);
        assert_eq!(
            rows,
            vec![
                ("a.b.0".to_string(), "1".to_string()),
                ("a.b.1".to_string(), "2".to_string()),
                ("c".to_string(), "x".to_string()),
                ("d".to_string(), "[]".to_string()),
            ]
        );
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            CliError::from(SiegelError::SingularY {
                min_eig: 0.0,
                max_eig: 1.0
            })
            .exit_code(),
            2
        );
        assert_eq!(CliError::from(SiegelError::DegenerateDirection).exit_code(), 3);
        let budget = HeightError::BudgetExceeded {
            level: 1,
            digits: 10,
            budget: 5,
        };
        assert_eq!(CliError::from(budget).exit_code(), 4);
        let wrapped = HeightError::Elliptic(EllipticError::BranchCut("1".into()));
        assert_eq!(CliError::from(wrapped).exit_code(), 2);
    }
}
