//! JSON state files.

use std::path::Path;

use mconc::{CMatrix, CVector, DensityMatrix, StateVector, SystemShape};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::Failure;

/// Largest deviation `"renormalize": true` will repair.
pub const RENORMALIZE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Pure,
    Mixed,
}

/// `{"dims": [...], "kind": "pure", "amplitudes": [[re, im], ...]}` or
/// `{"dims": [...], "kind": "mixed", "matrix": [[[re, im], ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub renormalize: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl State {
    pub fn shape(&self) -> &SystemShape {
        match self {
            State::Pure(psi) => psi.shape(),
            State::Mixed(rho) => rho.shape(),
        }
    }

    pub fn density(&self) -> Result<DensityMatrix, Failure> {
        match self {
            State::Pure(psi) => Ok(psi.projector()?),
            State::Mixed(rho) => Ok(rho.clone()),
        }
    }
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn complex([re, im]: [f64; 2]) -> Complex64 {
    Complex64::new(re, im)
}

impl StateFile {
    pub fn from_state(state: &State) -> Self {
        match state {
            State::Pure(psi) => Self {
                dims: psi.shape().dims().to_vec(),
                kind: Kind::Pure,
                amplitudes: Some(psi.amplitudes().iter().copied().map(pair).collect()),
                matrix: None,
                renormalize: false,
            },
            State::Mixed(rho) => {
                let m = rho.matrix();
                Self {
                    dims: rho.shape().dims().to_vec(),
                    kind: Kind::Mixed,
                    amplitudes: None,
                    matrix: Some(
                        (0..m.nrows())
                            .map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect())
                            .collect(),
                    ),
                    renormalize: false,
                }
            }
        }
    }

    pub fn read(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Failure::Usage(format!("{}: malformed state file: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state files serialize")
    }

    /// Validates the contents and builds the state.
    pub fn into_state(self) -> Result<State, Failure> {
        let shape = SystemShape::new(self.dims)?;
        let d = shape.total_dim();
        match self.kind {
            Kind::Pure => {
                if self.matrix.is_some() {
                    return Err(Failure::Usage("pure state file has a \"matrix\" field".into()));
                }
                let amps = self
                    .amplitudes
                    .ok_or_else(|| Failure::Usage("pure state file needs \"amplitudes\"".into()))?;
                if amps.len() != d {
                    return Err(Failure::Usage(format!("{} amplitudes for total dimension {d}", amps.len())));
                }
                let mut v = CVector::from_iterator(d, amps.into_iter().map(complex));
                if self.renormalize {
                    let n2 = v.norm_squared();
                    if (n2 - 1.0).abs() > RENORMALIZE_TOL {
                        return Err(Failure::Usage(format!(
                            "squared norm {n2} too far from 1 to renormalize"
                        )));
                    }
                    v = v.unscale(n2.sqrt());
                }
                Ok(State::Pure(StateVector::normalized(shape, v)?))
            }
            Kind::Mixed => {
                if self.amplitudes.is_some() {
                    return Err(Failure::Usage("mixed state file has an \"amplitudes\" field".into()));
                }
                let rows = self
                    .matrix
                    .ok_or_else(|| Failure::Usage("mixed state file needs \"matrix\"".into()))?;
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(Failure::Usage(format!("matrix is not {d}x{d}")));
                }
                let mut m = CMatrix::from_fn(d, d, |i, j| complex(rows[i][j]));
                if self.renormalize {
                    let herm = mconc::tensor::hermiticity_error(&m);
                    let tr = m.trace();
                    if herm > RENORMALIZE_TOL || (tr.re - 1.0).abs() > RENORMALIZE_TOL || tr.im.abs() > RENORMALIZE_TOL {
                        return Err(Failure::Usage(format!(
                            "matrix too far from a density matrix to renormalize (trace {tr}, hermiticity {herm:e})"
                        )));
                    }
                    m = (&m + m.adjoint()).unscale(2.0 * tr.re);
                }
                Ok(State::Mixed(DensityMatrix::new(shape, m)?))
            }
        }
    }
}

pub fn read_state(path: &Path) -> Result<State, Failure> {
    StateFile::read(path)?.into_state()
}
