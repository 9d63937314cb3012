//! JSON constraint-spec format.
//!
//! ```json
//! {"blocks": [2, 2],
//!  "marginal": {"type": "singleton", "q": [0.5, 0.5]},
//!  "conditionals": [{"type": "full"}, {"type": "fixed", "matrix": [[[1,0],[0,0]],[[0,0],[0,0]]]}]}
//! ```
//!
//! Marginals are `simplex`, `singleton` (`q`) or `vertices` (`vertices`);
//! conditionals are `full`, `fixed` (`matrix`) or `hull` (`matrices`). Complex
//! entries are `[re, im]` pairs in row-major nested arrays.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::block::BlockDecomposition;
use crate::constraint::{BlockConvexSet, ConditionalSet, MarginalPolytope};
use crate::error::{Error, Result};
use crate::linalg::{c64, CMat};
use crate::state::{DensityMatrix, ProbabilityVector};

pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSpecFile {
    pub blocks: Vec<usize>,
    pub marginal: MarginalSpec,
    pub conditionals: Vec<ConditionalSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MarginalSpec {
    Simplex,
    Singleton { q: Vec<f64> },
    Vertices { vertices: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ConditionalSpec {
    Full,
    Fixed { matrix: MatrixSpec },
    Hull { matrices: Vec<MatrixSpec> },
}

pub fn matrix_from_spec(m: &MatrixSpec, field: &str) -> Result<CMat> {
    let n = m.len();
    if n == 0 {
        return Err(Error::validation(field, "empty matrix"));
    }
    if let Some(i) = m.iter().position(|row| row.len() != n) {
        return Err(Error::validation(field, format!("row {i} has length {} (expected {n})", m[i].len())));
    }
    if m.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::validation(field, "non-finite entry"));
    }
    Ok(CMat::from_fn(n, n, |i, j| c64(m[i][j][0], m[i][j][1])))
}

pub fn matrix_to_spec(m: &CMat) -> MatrixSpec {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn density_from_spec(m: &MatrixSpec, field: &str, dim: usize) -> Result<DensityMatrix> {
    let mat = matrix_from_spec(m, field)?;
    if mat.nrows() != dim {
        return Err(Error::validation(field, format!("matrix is {0}×{0} but the block has dimension {dim}", mat.nrows())));
    }
    DensityMatrix::new(mat).map_err(|e| Error::validation(field, e))
}

fn probability_from_spec(v: &[f64], field: &str, r: usize) -> Result<ProbabilityVector> {
    if v.len() != r {
        return Err(Error::validation(field, format!("length {} but there are {r} blocks", v.len())));
    }
    ProbabilityVector::new(v.to_vec()).map_err(|e| Error::validation(field, e))
}

impl ConstraintSpecFile {
    pub fn to_constraint_set(&self) -> Result<BlockConvexSet> {
        let decomposition = BlockDecomposition::new(self.blocks.clone())?;
        let r = decomposition.num_blocks();
        let marginal = match &self.marginal {
            MarginalSpec::Simplex => MarginalPolytope::simplex(r),
            MarginalSpec::Singleton { q } => MarginalPolytope::singleton(probability_from_spec(q, "marginal.q", r)?),
            MarginalSpec::Vertices { vertices } => {
                let verts = vertices
                    .iter()
                    .enumerate()
                    .map(|(k, v)| probability_from_spec(v, &format!("marginal.vertices[{k}]"), r))
                    .collect::<Result<Vec<_>>>()?;
                MarginalPolytope::new(verts).map_err(|e| Error::validation("marginal.vertices", e))?
            }
        };
        if self.conditionals.len() != r {
            return Err(Error::validation(
                "conditionals",
                format!("{} entries for {r} blocks", self.conditionals.len()),
            ));
        }
        let conditionals = self
            .conditionals
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let dim = decomposition.dim(i);
                Ok(match c {
                    ConditionalSpec::Full => ConditionalSet::Full,
                    ConditionalSpec::Fixed { matrix } => {
                        ConditionalSet::Singleton(density_from_spec(matrix, &format!("conditionals[{i}].matrix"), dim)?)
                    }
                    ConditionalSpec::Hull { matrices } => {
                        if matrices.is_empty() {
                            return Err(Error::validation(format!("conditionals[{i}].matrices"), "no generators"));
                        }
                        ConditionalSet::Hull(
                            matrices
                                .iter()
                                .enumerate()
                                .map(|(k, m)| density_from_spec(m, &format!("conditionals[{i}].matrices[{k}]"), dim))
                                .collect::<Result<Vec<_>>>()?,
                        )
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        BlockConvexSet::new(decomposition, marginal, conditionals)
    }

    pub fn from_constraint_set(c: &BlockConvexSet) -> Self {
        let pi = c.marginal();
        let marginal = if pi.is_singleton() {
            MarginalSpec::Singleton {
                q: pi.vertices()[0].as_slice().to_vec(),
            }
        } else if pi.is_simplex() && pi.vertices().iter().enumerate().all(|(k, v)| v[k] == 1.0) {
            MarginalSpec::Simplex
        } else {
            MarginalSpec::Vertices {
                vertices: pi.vertices().iter().map(|v| v.as_slice().to_vec()).collect(),
            }
        };
        let conditionals = c
            .conditionals()
            .iter()
            .map(|s| match s {
                ConditionalSet::Full => ConditionalSpec::Full,
                ConditionalSet::Singleton(d) => ConditionalSpec::Fixed {
                    matrix: matrix_to_spec(d.matrix()),
                },
                ConditionalSet::Hull(g) => ConditionalSpec::Hull {
                    matrices: g.iter().map(|d| matrix_to_spec(d.matrix())).collect(),
                },
            })
            .collect();
        Self {
            blocks: c.decomposition().dims().to_vec(),
            marginal,
            conditionals,
        }
    }
}

/// Parses and validates spec text; `origin` names the source in parse errors.
pub fn parse_spec_str(text: &str, origin: &str) -> Result<BlockConvexSet> {
    let file: ConstraintSpecFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_string(),
        msg: e.to_string(),
    })?;
    file.to_constraint_set()
}

pub fn parse_spec(path: impl AsRef<Path>) -> Result<BlockConvexSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    parse_spec_str(&text, &path.display().to_string())
}

/// Compact canonical JSON for a constraint set.
pub fn serialize_spec(c: &BlockConvexSet) -> String {
    serde_json::to_string(&ConstraintSpecFile::from_constraint_set(c)).expect("spec serializes")
}

/// Observable file: either a bare matrix or `{"matrix": ...}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ObservableFile {
    Bare(MatrixSpec),
    Wrapped { matrix: MatrixSpec },
}

pub fn parse_observable(path: impl AsRef<Path>) -> Result<CMat> {
    let path = path.as_ref();
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        path: origin.clone(),
        msg: e.to_string(),
    })?;
    let file: ObservableFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: origin,
        msg: e.to_string(),
    })?;
    let m = match &file {
        ObservableFile::Bare(m) | ObservableFile::Wrapped { matrix: m } => m,
    };
    matrix_from_spec(m, "matrix")
}
