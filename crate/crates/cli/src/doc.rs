use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use weyl_core::{BaseGate, Circuit, LocalLayer, Mat2, Mat4};

use crate::CliError;

/// A square complex matrix as row-major `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub shape: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixDocument {
    fn from_entries<const N: usize>(rows: &[[Complex64; N]; N]) -> Self {
        Self {
            shape: N,
            entries: rows.iter().flatten().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn from_mat2(m: &Mat2) -> Self {
        Self::from_entries(&m.0)
    }

    pub fn from_mat4(m: &Mat4) -> Self {
        Self::from_entries(&m.0)
    }

    fn rows<const N: usize>(&self) -> Result<[[Complex64; N]; N], CliError> {
        if self.shape != N || self.entries.len() != N * N {
            return Err(CliError::parse(format!(
                "expected a {N}×{N} matrix, got shape {} with {} entries",
                self.shape,
                self.entries.len()
            )));
        }
        let mut rows = [[Complex64::new(0.0, 0.0); N]; N];
        for (k, [re, im]) in self.entries.iter().enumerate() {
            rows[k / N][k % N] = Complex64::new(*re, *im);
        }
        Ok(rows)
    }

    /// The 2×2 matrix, checked for unitarity within `tol` unless `tol` is `None`.
    pub fn to_mat2(&self, tol: Option<f64>) -> Result<Mat2, CliError> {
        let m = Mat2::from_rows(self.rows::<2>()?).map_err(CliError::from)?;
        if let Some(t) = tol {
            if !m.is_unitary(t) {
                return Err(CliError::from(weyl_core::Error::NonUnitaryInput {
                    deviation: m.unitarity_deviation(),
                    tolerance: t,
                }));
            }
        }
        Ok(m)
    }

    pub fn to_mat4(&self, tol: Option<f64>) -> Result<Mat4, CliError> {
        let m = Mat4::from_rows(self.rows::<4>()?).map_err(CliError::from)?;
        if let Some(t) = tol {
            m.ensure_unitary(t)?;
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseDocument {
    Controlled { gamma: f64 },
    Supercontrolled { alpha2: f64 },
    MirroredControlled { gamma: f64 },
    Custom { matrix: MatrixDocument },
}

impl BaseDocument {
    pub fn from_base(g: &BaseGate) -> Self {
        match g {
            BaseGate::Controlled { gamma } => Self::Controlled { gamma: *gamma },
            BaseGate::SuperControlled { alpha2 } => Self::Supercontrolled { alpha2: *alpha2 },
            BaseGate::MirroredControlled { gamma } => Self::MirroredControlled { gamma: *gamma },
            BaseGate::Custom(m) => Self::Custom {
                matrix: MatrixDocument::from_mat4(m),
            },
        }
    }

    pub fn to_base(&self, tol: Option<f64>) -> Result<BaseGate, CliError> {
        let g = match self {
            Self::Controlled { gamma } => BaseGate::Controlled { gamma: *gamma },
            Self::Supercontrolled { alpha2 } => BaseGate::SuperControlled { alpha2: *alpha2 },
            Self::MirroredControlled { gamma } => BaseGate::MirroredControlled { gamma: *gamma },
            Self::Custom { matrix } => BaseGate::Custom(matrix.to_mat4(tol)?),
        };
        if !matches!(g, BaseGate::Custom(_)) {
            g.validate().map_err(|e| CliError::parse(e.to_string()))?;
        }
        Ok(g)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerDocument {
    pub a: MatrixDocument,
    pub b: MatrixDocument,
}

/// `e^{i·phase} · L_n · G · … · G · L_0`, with `layers[0]` applied first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitDocument {
    pub phase: f64,
    pub applications: usize,
    pub base: BaseDocument,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<Option<BaseDocument>>,
    pub layers: Vec<LayerDocument>,
}

impl CircuitDocument {
    pub fn from_circuit(c: &Circuit) -> Self {
        Self {
            phase: c.phase,
            applications: c.n(),
            base: BaseDocument::from_base(&c.base),
            overrides: c
                .overrides
                .iter()
                .map(|o| o.as_ref().map(BaseDocument::from_base))
                .collect(),
            layers: c
                .layers
                .iter()
                .map(|l| LayerDocument {
                    a: MatrixDocument::from_mat2(&l.a),
                    b: MatrixDocument::from_mat2(&l.b),
                })
                .collect(),
        }
    }

    pub fn to_circuit(&self, tol: Option<f64>) -> Result<Circuit, CliError> {
        if self.layers.len() != self.applications + 1 {
            return Err(CliError::parse(format!(
                "{} layers for {} applications",
                self.layers.len(),
                self.applications
            )));
        }
        if !self.overrides.is_empty() && self.overrides.len() != self.applications {
            return Err(CliError::parse(format!(
                "{} overrides for {} applications",
                self.overrides.len(),
                self.applications
            )));
        }
        let layers = self
            .layers
            .iter()
            .map(|l| Ok(LocalLayer::new(l.a.to_mat2(tol)?, l.b.to_mat2(tol)?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        let overrides = self
            .overrides
            .iter()
            .map(|o| o.as_ref().map(|b| b.to_base(tol)).transpose())
            .collect::<Result<Vec<_>, CliError>>()?;
        if !self.phase.is_finite() {
            return Err(CliError::parse("non-finite phase"));
        }
        Ok(Circuit {
            phase: self.phase,
            layers,
            base: self.base.to_base(tol)?,
            overrides,
        })
    }
}
