//! JSON problem files.

use crate::linalg::Matrix;
use crate::measure::{DiscreteLaw, MeasureError, UniformBoxLaw, XiDistribution};
use crate::recourse::{RecourseError, RecourseScenario, TwoStageProblem};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {msg}")]
    Parse { path: String, msg: String },
    #[error("{path}: {msg}")]
    Invalid { path: String, msg: String },
    #[error("reading {file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstStage {
    pub c: Vec<f64>,
    #[serde(rename = "A", default)]
    pub a: Matrix,
    #[serde(default)]
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedRecourse {
    #[serde(rename = "W")]
    pub w: Matrix,
    pub q: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl FileOptions {
    fn is_empty(&self) -> bool {
        *self == FileOptions::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub first_stage: FirstStage,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recourse: Option<FixedRecourse>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recourse_scenarios: Option<Vec<RecourseScenario>>,
    pub distribution: XiDistribution,
    #[serde(default, skip_serializing_if = "FileOptions::is_empty")]
    pub options: FileOptions,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, FileError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            if path == "distribution" {
                if let Some(err) = payload_error(text) {
                    return err;
                }
            }
            FileError::Parse {
                path,
                msg: e.inner().to_string(),
            }
        })
    }

    pub fn read(path: &str) -> Result<Self, FileError> {
        let text = std::fs::read_to_string(path).map_err(|source| FileError::Io {
            file: path.to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files serialize")
    }

    pub fn from_problem(name: Option<&str>, p: &TwoStageProblem) -> Self {
        let (recourse, recourse_scenarios) = if p.recourse.len() == 1 {
            let r = &p.recourse[0];
            (
                Some(FixedRecourse {
                    w: r.w.clone(),
                    q: r.q.clone(),
                }),
                None,
            )
        } else {
            (None, Some(p.recourse.clone()))
        };
        ProblemFile {
            name: name.map(str::to_string),
            first_stage: FirstStage {
                c: p.c.clone(),
                a: p.a.clone(),
                b: p.b.clone(),
            },
            recourse,
            recourse_scenarios,
            distribution: p.dist.clone(),
            options: FileOptions::default(),
        }
    }

    /// Validates dimensions and probabilities and builds the problem.
    pub fn to_problem(&self) -> Result<TwoStageProblem, FileError> {
        let scenarios = match (&self.recourse, &self.recourse_scenarios) {
            (Some(r), None) => vec![RecourseScenario {
                w: r.w.clone(),
                q: r.q.clone(),
                weight: 1.0,
            }],
            (None, Some(s)) => s.clone(),
            (Some(_), Some(_)) => {
                return Err(FileError::Invalid {
                    path: "recourse".into(),
                    msg: "give either recourse or recourse_scenarios, not both".into(),
                })
            }
            (None, None) => {
                return Err(FileError::Invalid {
                    path: "recourse".into(),
                    msg: "missing recourse data".into(),
                })
            }
        };
        let p = TwoStageProblem {
            c: self.first_stage.c.clone(),
            a: self.first_stage.a.clone(),
            b: self.first_stage.b.clone(),
            recourse: scenarios,
            dist: self.distribution.clone(),
        };
        p.validate().map_err(|e| match e {
            RecourseError::Structural { path, msg } => FileError::Invalid {
                path: if self.recourse.is_some() {
                    path.replace("recourse[0]", "recourse")
                } else {
                    path.replace("recourse[", "recourse_scenarios[")
                },
                msg,
            },
            RecourseError::Measure(m) => {
                let sub = match &m {
                    MeasureError::DimensionMismatch { path, .. } | MeasureError::InvalidInterval { path, .. } => {
                        format!(".{path}")
                    }
                    MeasureError::InvalidWeights { .. } => ".atoms".into(),
                    MeasureError::Geometry(_) => String::new(),
                };
                FileError::Invalid {
                    path: format!("distribution.payload{sub}"),
                    msg: m.to_string(),
                }
            }
            other => FileError::Invalid {
                path: "".into(),
                msg: other.to_string(),
            },
        })?;
        Ok(p)
    }
}

/// A payload read before its `type` tag loses its error path; re-read it alone.
fn payload_error(text: &str) -> Option<FileError> {
    let v: serde_json::Value = serde_json::from_str(text).ok()?;
    let d = v.get("distribution")?;
    let payload = d.get("payload")?.clone();
    let err = match d.get("type")?.as_str()? {
        "atoms" => serde_path_to_error::deserialize::<_, DiscreteLaw>(payload).err()?,
        "uniform_box" => serde_path_to_error::deserialize::<_, UniformBoxLaw>(payload).err()?,
        _ => return None,
    };
    Some(FileError::Parse {
        path: format!("distribution.payload.{}", err.path()),
        msg: err.inner().to_string(),
    })
}
