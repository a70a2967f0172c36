//! Numerical foundation: 2×2 and 4×4 complex matrices, Kronecker products,
//! Pauli exponentials, the magic basis, phase-insensitive distance and Haar
//! sampling.
//!
//! Two-qubit matrices are ordered in the computational basis
//! `|00⟩, |01⟩, |10⟩, |11⟩` with qubit A as the left (most significant)
//! Kronecker factor.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Numerical tolerances used across the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max-norm bound on `U†U − I` for a matrix to count as unitary.
    pub unitarity: f64,
    /// Componentwise equality of coordinates and matrices.
    pub equality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unitarity: 1e-10,
            equality: 1e-9,
        }
    }
}

fn check_finite(z: &Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// A 2×2 complex matrix (single-qubit gate).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

/// A 4×4 complex matrix (two-qubit gate).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4(pub [[Complex64; 4]; 4]);

impl Mat2 {
    pub fn from_rows(rows: [[Complex64; 2]; 2]) -> Result<Self> {
        rows.iter().flatten().try_for_each(check_finite)?;
        Ok(Self(rows))
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> Complex64) -> Self {
        Self([[f(0, 0), f(0, 1)], [f(1, 0), f(1, 1)]])
    }

    pub fn identity() -> Self {
        Self([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn pauli_x() -> Self {
        Self([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn pauli_y() -> Self {
        Self([[ZERO, -I], [I, ZERO]])
    }

    pub fn pauli_z() -> Self {
        Self([[ONE, ZERO], [ZERO, -ONE]])
    }

    /// Pauli matrix by axis index 1, 2, 3 (0 gives the identity).
    pub fn pauli(axis: usize) -> Self {
        match axis {
            0 => Self::identity(),
            1 => Self::pauli_x(),
            2 => Self::pauli_y(),
            3 => Self::pauli_z(),
            _ => panic!("pauli axis must be in 0..=3, got {axis}"),
        }
    }

    pub fn hadamard() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self([[h, h], [h, -h]])
    }

    /// Phase gate diag(1, i).
    pub fn phase_s() -> Self {
        Self([[ONE, ZERO], [ZERO, I]])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_deviation(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Self::identity())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    /// Rescales to unit determinant, returning the matrix and the phase `φ`
    /// such that `self = e^{iφ} · result`.
    pub fn to_special(&self) -> (Self, f64) {
        let phase = self.det().arg() / 2.0;
        (self.scale(Complex64::from_polar(1.0, -phase)), phase)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        Mat2::from_fn(|i, j| self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j])
    }
}

impl Mat4 {
    pub fn from_rows(rows: [[Complex64; 4]; 4]) -> Result<Self> {
        rows.iter().flatten().try_for_each(check_finite)?;
        Ok(Self(rows))
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                *z = f(i, j);
            }
        }
        Self(m)
    }

    /// Builds a matrix from its columns.
    pub fn from_columns(cols: [[Complex64; 4]; 4]) -> Self {
        Self::from_fn(|i, j| cols[j][i])
    }

    pub fn identity() -> Self {
        Self::diagonal([ONE; 4])
    }

    pub fn diagonal(d: [Complex64; 4]) -> Self {
        Self::from_fn(|i, j| if i == j { d[i] } else { ZERO })
    }

    /// The SWAP gate.
    pub fn swap() -> Self {
        let mut m = [[ZERO; 4]; 4];
        m[0][0] = ONE;
        m[1][2] = ONE;
        m[2][1] = ONE;
        m[3][3] = ONE;
        Self(m)
    }

    /// CNOT with qubit A as control.
    pub fn cnot() -> Self {
        let mut m = [[ZERO; 4]; 4];
        m[0][0] = ONE;
        m[1][1] = ONE;
        m[2][3] = ONE;
        m[3][2] = ONE;
        Self(m)
    }

    pub fn column(&self, j: usize) -> [Complex64; 4] {
        [self.0[0][j], self.0[1][j], self.0[2][j], self.0[3][j]]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    /// Multiplies by the global phase `e^{iφ}`.
    pub fn with_phase(&self, phase: f64) -> Self {
        self.scale(Complex64::from_polar(1.0, phase))
    }

    pub fn apply(&self, v: [Complex64; 4]) -> [Complex64; 4] {
        let mut out = [ZERO; 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|k| self.0[i][k] * v[k]).sum();
        }
        out
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> Complex64 {
        let mut a = self.0;
        let mut det = ONE;
        for col in 0..4 {
            let pivot = (col..4)
                .max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))
                .unwrap();
            if a[pivot][col].norm() == 0.0 {
                return ZERO;
            }
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            det *= a[col][col];
            for row in col + 1..4 {
                let f = a[row][col] / a[col][col];
                for k in col..4 {
                    let v = a[col][k];
                    a[row][k] -= f * v;
                }
            }
        }
        det
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_deviation(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Self::identity())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    /// Returns `Ok(())` when unitary within `tol`, otherwise
    /// [`Error::NonUnitaryInput`].
    pub fn ensure_unitary(&self, tol: f64) -> Result<()> {
        let deviation = self.unitarity_deviation();
        if deviation.is_finite() && deviation <= tol {
            Ok(())
        } else {
            Err(Error::NonUnitaryInput {
                deviation,
                tolerance: tol,
            })
        }
    }

    /// Conjugation by SWAP: exchanges the roles of the two qubits.
    pub fn swap_qubits(&self) -> Self {
        const P: [usize; 4] = [0, 2, 1, 3];
        Self::from_fn(|i, j| self.0[P[i]][P[j]])
    }
}

impl Mul for Mat4 {
    type Output = Mat4;

    fn mul(self, rhs: Mat4) -> Mat4 {
        Mat4::from_fn(|i, j| (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum())
    }
}

impl fmt::Display for Mat4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.0 {
            let cells: Vec<String> = row
                .iter()
                .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Kronecker product `a ⊗ b` with `a` acting on qubit A.
pub fn tensor(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|i, j| a.0[i / 2][j / 2] * b.0[i % 2][j % 2])
}

/// A layer of single-qubit gates, `a` on qubit A and `b` on qubit B.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalLayer {
    pub a: Mat2,
    pub b: Mat2,
}

impl LocalLayer {
    pub fn new(a: Mat2, b: Mat2) -> Self {
        Self { a, b }
    }

    pub fn identity() -> Self {
        Self::new(Mat2::identity(), Mat2::identity())
    }

    /// The same gate on both qubits.
    pub fn both(m: Mat2) -> Self {
        Self::new(m, m)
    }

    pub fn to_mat4(&self) -> Mat4 {
        tensor(&self.a, &self.b)
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.a.adjoint(), self.b.adjoint())
    }

    /// Exchanges the factors, i.e. conjugation by SWAP.
    pub fn swapped(&self) -> Self {
        Self::new(self.b, self.a)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.a.is_unitary(tol) && self.b.is_unitary(tol)
    }

    /// Rescales both factors to unit determinant. Returns the layer and the
    /// phase pushed out of it.
    pub fn to_special(&self) -> (Self, f64) {
        let (a, pa) = self.a.to_special();
        let (b, pb) = self.b.to_special();
        (Self::new(a, b), pa + pb)
    }

    /// Splits a 4×4 matrix known to be a tensor product into its factors.
    ///
    /// The factorization is exact for `A ⊗ B` inputs; for anything else the
    /// returned layer is the nearest product in the sense of the dominant
    /// 2×2 block. Both factors come back with unit determinant and the
    /// leftover scalar is returned as a phase.
    pub fn factor(m: &Mat4) -> (Self, f64) {
        let block = |bi: usize, bj: usize| {
            Mat2::from_fn(|k, l| m.0[2 * bi + k][2 * bj + l])
        };
        let (bi, bj) = (0..4)
            .map(|idx| (idx / 2, idx % 2))
            .max_by(|&(a, b), &(c, d)| {
                frob(&block(a, b)).total_cmp(&frob(&block(c, d)))
            })
            .unwrap();
        let dominant = block(bi, bj);
        // dominant = a[bi][bj] · B; pin B to unit determinant.
        let root = dominant.det().sqrt();
        let b = dominant.scale(root.inv());
        let b_adj = b.adjoint();
        let a = Mat2::from_fn(|i, j| (b_adj * block(i, j)).trace() / 2.0);
        let (a, phase) = a.to_special();
        (Self::new(a, b), phase)
    }
}

fn frob(m: &Mat2) -> f64 {
    m.0.iter().flatten().map(|z| z.norm_sqr()).sum()
}

impl Mul for LocalLayer {
    type Output = LocalLayer;

    /// `(p * q)` applies `q` first, matching matrix multiplication.
    fn mul(self, rhs: LocalLayer) -> LocalLayer {
        LocalLayer::new(self.a * rhs.a, self.b * rhs.b)
    }
}

/// The magic basis `|Φ1⟩..|Φ4⟩` in which every canonical gate is diagonal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MagicBasis {
    /// Columns are `|Φ1⟩, |Φ2⟩, |Φ3⟩, |Φ4⟩`.
    pub q: Mat4,
}

impl Default for MagicBasis {
    fn default() -> Self {
        Self::new()
    }
}

impl MagicBasis {
    pub fn new() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let r = Complex64::new(s, 0.0);
        let j = Complex64::new(0.0, s);
        let phi1 = [r, ZERO, ZERO, r];
        let phi2 = [ZERO, j, j, ZERO];
        let phi3 = [ZERO, r, -r, ZERO];
        let phi4 = [j, ZERO, ZERO, -j];
        Self {
            q: Mat4::from_columns([phi1, phi2, phi3, phi4]),
        }
    }

    /// `|Φ_j⟩` for `j` in `0..4` (zero-based).
    pub fn state(&self, j: usize) -> [Complex64; 4] {
        self.q.column(j)
    }

    /// Representation of `u` in the magic basis, `Q† u Q`.
    pub fn to_magic(&self, u: &Mat4) -> Mat4 {
        self.q.adjoint() * *u * self.q
    }

    /// Inverse of [`MagicBasis::to_magic`].
    pub fn from_magic(&self, m: &Mat4) -> Mat4 {
        self.q * *m * self.q.adjoint()
    }
}

/// Eigenphases `λ1..λ4` of `U_d(c1, c2, c3)` on `|Φ1⟩..|Φ4⟩`.
pub fn magic_eigenphases(c: [f64; 3]) -> [f64; 4] {
    let [c1, c2, c3] = c;
    [c1 - c2 + c3, c1 + c2 - c3, -c1 - c2 - c3, -c1 + c2 + c3]
}

/// `U_d(c1,c2,c3) = exp(i(c1 σ1⊗σ1 + c2 σ2⊗σ2 + c3 σ3⊗σ3))`, built as a
/// diagonal in the magic basis.
pub fn canonical_gate(c1: f64, c2: f64, c3: f64) -> Mat4 {
    let lambda = magic_eigenphases([c1, c2, c3]);
    let d = Mat4::diagonal(lambda.map(|l| Complex64::from_polar(1.0, l)));
    MagicBasis::new().from_magic(&d)
}

/// `exp((i/2) γ σ3⊗σ3)`, the controlled gate of strength `γ`.
pub fn controlled_gate(gamma: f64) -> Mat4 {
    let p = Complex64::from_polar(1.0, gamma / 2.0);
    let m = p.conj();
    Mat4::diagonal([p, m, m, p])
}

/// `exp(i(θ/2) σ_y)`.
pub fn rot_y(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    let c = Complex64::new(c, 0.0);
    let s = Complex64::new(s, 0.0);
    Mat2([[c, s], [-s, c]])
}

/// `exp(i(θ/2) σ_z)`.
pub fn rot_z(theta: f64) -> Mat2 {
    let p = Complex64::from_polar(1.0, theta / 2.0);
    Mat2([[p, ZERO], [ZERO, p.conj()]])
}

/// `exp(i(θ/2) σ_x)`.
pub fn rot_x(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    Mat2([
        [Complex64::new(c, 0.0), Complex64::new(0.0, s)],
        [Complex64::new(0.0, s), Complex64::new(c, 0.0)],
    ])
}

/// `1 − |tr(u†v)|/4`; zero exactly when `u` and `v` agree up to a global
/// phase.
pub fn distance_up_to_phase(u: &Mat4, v: &Mat4) -> f64 {
    let overlap = (u.adjoint() * *v).trace().norm() / 4.0;
    (1.0 - overlap).max(0.0)
}

/// The phase `φ` maximizing the overlap of `e^{iφ} u` with `v`.
pub fn relative_phase(u: &Mat4, v: &Mat4) -> f64 {
    (u.adjoint() * *v).trace().arg()
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Modified Gram–Schmidt on the columns of a complex Gaussian matrix. The
/// diagonal of the implied `R` factor is real positive, which makes the
/// resulting `Q` Haar distributed.
fn orthonormalize<const N: usize>(mut cols: [[Complex64; N]; N]) -> [[Complex64; N]; N] {
    for j in 0..N {
        for k in 0..j {
            let proj: Complex64 = (0..N).map(|i| cols[k][i].conj() * cols[j][i]).sum();
            for i in 0..N {
                let v = cols[k][i];
                cols[j][i] -= proj * v;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    cols
}

pub fn haar_u2_from(rng: &mut impl Rng) -> Mat2 {
    let mut cols = [[ZERO; 2]; 2];
    cols.iter_mut().flatten().for_each(|z| *z = gaussian(rng));
    let q = orthonormalize(cols);
    Mat2::from_fn(|i, j| q[j][i])
}

pub fn haar_u4_from(rng: &mut impl Rng) -> Mat4 {
    let mut cols = [[ZERO; 4]; 4];
    cols.iter_mut().flatten().for_each(|z| *z = gaussian(rng));
    Mat4::from_columns(orthonormalize(cols))
}

/// Haar-random single-qubit unitary, deterministic in `seed`.
pub fn haar_random_u2(seed: u64) -> Mat2 {
    haar_u2_from(&mut ChaCha20Rng::seed_from_u64(seed))
}

/// Haar-random two-qubit unitary, deterministic in `seed`.
pub fn haar_random_u4(seed: u64) -> Mat4 {
    haar_u4_from(&mut ChaCha20Rng::seed_from_u64(seed))
}

/// Haar-random local layer.
pub fn haar_local_from(rng: &mut impl Rng) -> LocalLayer {
    let a = haar_u2_from(rng);
    let b = haar_u2_from(rng);
    LocalLayer::new(a, b)
}
