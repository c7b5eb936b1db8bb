//! JSON inequality files.
//!
//! ```json
//! {
//!   "name": "chsh",
//!   "parties": 2,
//!   "outcomes": [2, 2],
//!   "settings": [2, 2],
//!   "coefficients": [{"a": [0, 0], "x": [0, 0], "value": 1.0}, ...]
//! }
//! ```
//!
//! Entries not listed are zero. Repeating an `(a, x)` pair is an error.

use std::collections::HashMap;
use std::path::Path;

use magicwit::bell::{BellInequality, Scenario};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InequalitySpecFile {
    #[serde(default)]
    pub name: Option<String>,
    pub parties: usize,
    pub outcomes: Vec<usize>,
    pub settings: Vec<usize>,
    pub coefficients: Vec<CoefficientRecord>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientRecord {
    pub a: Vec<usize>,
    pub x: Vec<usize>,
    pub value: f64,
}

fn spec_error(path: &Path, msg: impl std::fmt::Display) -> CliError {
    CliError::Spec(format!("{}: {msg}", path.display()))
}

pub fn load(path: &Path) -> Result<BellInequality, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    parse(&text, path)
}

pub fn parse(text: &str, path: &Path) -> Result<BellInequality, CliError> {
    let spec: InequalitySpecFile = serde_json::from_str(text)
        .map_err(|e| spec_error(path, format_args!("line {}, column {}: {e}", e.line(), e.column())))?;
    let n = spec.parties;
    if n == 0 {
        return Err(spec_error(path, "field `parties`: must be at least 1"));
    }
    for (field, list) in [("outcomes", &spec.outcomes), ("settings", &spec.settings)] {
        if list.len() != n {
            return Err(spec_error(path, format_args!("field `{field}`: has {} entries, `parties` is {n}", list.len())));
        }
    }
    let scenario = Scenario::new(spec.outcomes.clone(), spec.settings.clone())
        .map_err(|e| spec_error(path, format_args!("fields `outcomes`/`settings`: {e}")))?;
    let mut coeffs = vec![0.0; scenario.len()];
    let mut seen: HashMap<usize, usize> = HashMap::new();
    for (i, rec) in spec.coefficients.iter().enumerate() {
        for (field, tuple, bounds) in [("a", &rec.a, &spec.outcomes), ("x", &rec.x, &spec.settings)] {
            if tuple.len() != n {
                return Err(spec_error(
                    path,
                    format_args!("field `coefficients[{i}].{field}`: has {} entries, expected {n}", tuple.len()),
                ));
            }
            if let Some(party) = (0..n).find(|&p| tuple[p] >= bounds[p]) {
                return Err(spec_error(
                    path,
                    format_args!(
                        "field `coefficients[{i}].{field}[{party}]`: value {} out of range (party {party} has {})",
                        tuple[party], bounds[party]
                    ),
                ));
            }
        }
        if !rec.value.is_finite() {
            return Err(spec_error(path, format_args!("field `coefficients[{i}].value`: not a finite number")));
        }
        let idx = scenario.index(&rec.a, &rec.x);
        if let Some(first) = seen.insert(idx, i) {
            return Err(spec_error(
                path,
                format_args!(
                    "field `coefficients[{i}]`: duplicate entry for a={:?}, x={:?} (first given at coefficients[{first}])",
                    rec.a, rec.x
                ),
            ));
        }
        coeffs[idx] = rec.value;
    }
    let name = spec.name.unwrap_or_else(|| path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned()));
    BellInequality::new(name, scenario, coeffs).map_err(|e| spec_error(path, e))
}
