//! JSON state files: `{"dims": [d1, ..., dK], "amplitudes": [[re, im], ...]}`
//! with amplitudes in row-major order (first subsystem slowest).
//!
//! The reader normalizes the amplitudes and rejects a zero vector.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::state::{PureState, C64};

#[derive(Debug, Serialize, Deserialize)]
struct StateFile {
    dims: Vec<usize>,
    amplitudes: Vec<[f64; 2]>,
}

pub fn read_state(path: &Path) -> Result<PureState> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    parse_state(&text)
}

/// Parses and validates a state document; errors name the first invalid
/// field.
pub fn parse_state(text: &str) -> Result<PureState> {
    let doc: Value =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("not valid JSON: {e}")))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::Format("top level must be an object".into()))?;

    let dims_val = obj
        .get("dims")
        .ok_or_else(|| Error::Format("missing field `dims`".into()))?;
    let dims_arr = dims_val
        .as_array()
        .ok_or_else(|| Error::Format("`dims` must be an array".into()))?;
    if dims_arr.is_empty() {
        return Err(Error::Format("`dims` must not be empty".into()));
    }
    let mut dims = Vec::with_capacity(dims_arr.len());
    for (i, d) in dims_arr.iter().enumerate() {
        match d.as_u64() {
            Some(d) if d >= 2 => dims.push(d as usize),
            _ => {
                return Err(Error::Format(format!(
                    "`dims[{i}]` must be an integer >= 2, got {d}"
                )))
            }
        }
    }

    let amps_val = obj
        .get("amplitudes")
        .ok_or_else(|| Error::Format("missing field `amplitudes`".into()))?;
    let amps_arr = amps_val
        .as_array()
        .ok_or_else(|| Error::Format("`amplitudes` must be an array".into()))?;
    let expected = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::Format("`dims` product overflows".into()))?;
    if amps_arr.len() != expected {
        return Err(Error::Format(format!(
            "`amplitudes` has {} entries, dims require {expected}",
            amps_arr.len()
        )));
    }
    let mut amplitudes = Vec::with_capacity(expected);
    for (i, a) in amps_arr.iter().enumerate() {
        let pair = a
            .as_array()
            .filter(|p| p.len() == 2)
            .and_then(|p| Some((p[0].as_f64()?, p[1].as_f64()?)));
        match pair {
            Some((re, im)) if re.is_finite() && im.is_finite() => {
                amplitudes.push(C64::new(re, im))
            }
            _ => {
                return Err(Error::Format(format!(
                    "`amplitudes[{i}]` must be a pair [re, im] of finite numbers, got {a}"
                )))
            }
        }
    }
    if amplitudes.iter().all(|a| a.norm_sqr() == 0.0) {
        return Err(Error::Format("`amplitudes` has zero norm".into()));
    }
    PureState::new(dims, amplitudes).map_err(|e| Error::Format(e.to_string()))
}

pub fn to_json(psi: &PureState) -> String {
    let doc = StateFile {
        dims: psi.dims().to_vec(),
        amplitudes: psi.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
    };
    serde_json::to_string(&doc).expect("plain data serializes")
}

pub fn write_state(path: &Path, psi: &PureState) -> Result<()> {
    fs::write(path, to_json(psi) + "\n")
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}
