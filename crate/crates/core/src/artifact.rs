//! Versioned JSON artifacts.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

/// Version written into, and required from, every artifact.
pub const VERSION: u32 = 1;

pub(crate) fn check_version(artifact: &'static str, found: u32) -> Result<()> {
    if found == VERSION {
        Ok(())
    } else {
        Err(Error::VersionMismatch {
            artifact,
            found,
            expected: VERSION,
        })
    }
}

pub fn save_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_slice(&bytes)?)
}

/// JSON has no infinities; scores are written as numbers with `"inf"`,
/// `"-inf"` and `"nan"` strings for the non-finite cases.
pub(crate) mod scores {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(values: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let reprs: Vec<Repr> = values
            .iter()
            .map(|&v| {
                if v.is_finite() {
                    Repr::Num(v)
                } else if v.is_nan() {
                    Repr::Text("nan".into())
                } else if v > 0.0 {
                    Repr::Text("inf".into())
                } else {
                    Repr::Text("-inf".into())
                }
            })
            .collect();
        reprs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<Repr>::deserialize(d)?
            .into_iter()
            .map(|r| match r {
                Repr::Num(v) => Ok(v),
                Repr::Text(t) => match t.as_str() {
                    "inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    "nan" => Ok(f64::NAN),
                    other => Err(serde::de::Error::custom(format!("bad score {other:?}"))),
                },
            })
            .collect()
    }
}
