//! Job input: a configuration given column by column, optional labels and
//! an optional parameter vector of `"p/q"` strings.

use std::io::Read;
use std::path::Path;

use gkzkit::config::PointConfiguration;
use gkzkit::hyper::ParameterVector;
use gkzkit::matrix::{Int, IntMatrix, Rat};
use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("malformed input JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Library(#[from] gkzkit::Error),
}

/// A matrix entry: a JSON integer or a decimal string for large values.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Entry {
    Small(i64),
    Text(String),
}

impl Entry {
    fn to_int(&self) -> Result<Int, InputError> {
        match self {
            Entry::Small(v) => Ok(Int::from(*v)),
            Entry::Text(s) => s.trim().parse().map_err(|_| InputError::Invalid(format!("matrix entry {s:?} is not an integer"))),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJob {
    /// Columns of the configuration.
    matrix: Vec<Vec<Entry>>,
    labels: Option<Vec<String>>,
    beta: Option<Vec<String>>,
}

#[derive(Debug)]
pub struct Job {
    /// The input document as parsed, echoed into the report.
    pub echo: Value,
    pub config: PointConfiguration,
    pub beta: Option<Vec<Rat>>,
}

pub fn read_source(path: &str) -> Result<String, InputError> {
    let mut text = String::new();
    if path == "-" {
        std::io::stdin().read_to_string(&mut text).map_err(|source| InputError::Io { path: "stdin".into(), source })?;
    } else {
        text = std::fs::read_to_string(Path::new(path)).map_err(|source| InputError::Io { path: path.into(), source })?;
    }
    Ok(text)
}

pub fn parse_beta<S: AsRef<str>>(items: &[S]) -> Result<Vec<Rat>, InputError> {
    Ok(ParameterVector::parse(items)?.entries().to_vec())
}

pub fn parse_job(text: &str) -> Result<Job, InputError> {
    let echo: Value = serde_json::from_str(text)?;
    let raw: RawJob = serde_json::from_value(echo.clone())?;
    let Some(first) = raw.matrix.first() else {
        return Err(InputError::Invalid("matrix has no columns".into()));
    };
    let rows = first.len();
    if rows == 0 || raw.matrix.iter().any(|c| c.len() != rows) {
        return Err(InputError::Invalid("matrix columns must be nonempty and of equal length".into()));
    }
    let cols = raw
        .matrix
        .iter()
        .map(|c| c.iter().map(Entry::to_int).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let matrix = IntMatrix::from_cols(rows, &cols)?;
    let config = PointConfiguration::new(matrix, raw.labels)?;
    let beta = raw.beta.as_deref().map(parse_beta).transpose()?;
    Ok(Job { echo, config, beta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_columns_and_beta() {
        let job = parse_job(r#"{"matrix": [[1, 0], [1, 1], [1, "3"]], "beta": ["1/2", "-1"]}"#).unwrap();
        assert_eq!(job.config.len(), 3);
        assert_eq!(job.config.ambient_dim(), 2);
        assert_eq!(job.beta.unwrap()[0], Rat::new(Int::from(1), Int::from(2)));
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(parse_job("{"), Err(InputError::Json(_))));
        assert!(matches!(parse_job(r#"{"matrix": [[1, 0], [1]]}"#), Err(InputError::Invalid(_))));
        assert!(matches!(parse_job(r#"{"matrix": [[1, 0]], "extra": 1}"#), Err(InputError::Json(_))));
        assert!(matches!(parse_job(r#"{"matrix": [[1, 0], [1, 0]]}"#), Err(InputError::Library(_))));
    }
}
