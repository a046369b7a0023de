//! Source description documents.
//!
//! Two JSON shapes are accepted:
//!
//! ```json
//! { "alphabet_sizes": [2, 2, 2], "pmf": [0.125, ...], "labels": { "x": [...], "y": [...], "z": [...] } }
//! { "builtin": "bsc_chain", "p": 0.02, "q": 0.15 }
//! ```
//!
//! `pmf` is flat row-major over `(x, y, z)` with `z` varying fastest.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AlphabetSizes, BscChainParams, JointSource, Labels, SourceError};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SourceSpec {
    Builtin {
        builtin: String,
        p: f64,
        q: f64,
    },
    Table {
        alphabet_sizes: AlphabetSizes,
        pmf: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Labels>,
    },
}

impl SourceSpec {
    pub fn build<T: Real>(&self) -> Result<JointSource<T>, SourceError> {
        match self {
            SourceSpec::Builtin { builtin, p, q } => match builtin.as_str() {
                "bsc_chain" => Ok(JointSource::bsc_chain(BscChainParams::new(
                    T::lit(*p),
                    T::lit(*q),
                )?)),
                other => Err(SourceError::UnknownBuiltin(other.to_string())),
            },
            SourceSpec::Table {
                alphabet_sizes,
                pmf,
                labels,
            } => {
                let src =
                    JointSource::new(*alphabet_sizes, pmf.iter().map(|&v| T::lit(v)).collect())?;
                match labels {
                    Some(l) => src.with_labels(l.clone()),
                    None => Ok(src),
                }
            }
        }
    }

    /// Table form of an existing source.
    pub fn from_source<T: Real>(src: &JointSource<T>) -> Self {
        SourceSpec::Table {
            alphabet_sizes: src.sizes(),
            pmf: src.pmf().iter().map(|v| v.f64()).collect(),
            labels: src.labels().cloned(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("source description serializes")
    }
}

pub fn load_joint_pmf<T: Real>(text: &str) -> Result<JointSource<T>, SourceError> {
    let spec: SourceSpec =
        serde_json::from_str(text).map_err(|e| SourceError::Parse(e.to_string()))?;
    spec.build()
}

pub fn load_joint_pmf_file<T: Real>(path: impl AsRef<Path>) -> Result<JointSource<T>, SourceError> {
    load_joint_pmf(&std::fs::read_to_string(path)?)
}
