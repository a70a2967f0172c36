//! Canonical (KAK) decomposition of two-qubit unitaries.
//!
//! Every two-qubit gate factors as
//! `U = e^{iφ} (A1 ⊗ B1) U_d(c1, c2, c3) (A0 ⊗ B0)` with the coordinates in
//! the Weyl chamber `π/4 ≥ c1 ≥ c2 ≥ |c3| ≥ 0`. On the face `c1 = π/4` the
//! points `(π/4, c2, c3)` and `(π/4, c2, −c3)` name the same class; the
//! representative with `c3 ≥ 0` is returned there.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{
    canonical_gate, magic_eigenphases, LocalLayer, MagicBasis, Mat2, Mat4, Tolerances,
};

/// Slack used when deciding whether a point sits on the `c1 = π/4` face.
const FACE_SLACK: f64 = 1e-12;

/// Location of a gate in the Weyl chamber.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalCoords {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl CanonicalCoords {
    pub const fn new(c1: f64, c2: f64, c3: f64) -> Self {
        Self { c1, c2, c3 }
    }

    pub fn from_array(c: [f64; 3]) -> Self {
        Self::new(c[0], c[1], c[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }

    /// Doubled coordinates `(h1, h2, h3)` with `U_d(h1/2, h2/2, h3/2)`, the
    /// parametrization used for controlled-gate budgets.
    pub fn doubled(self) -> [f64; 3] {
        [2.0 * self.c1, 2.0 * self.c2, 2.0 * self.c3]
    }

    pub fn from_doubled(h: [f64; 3]) -> Self {
        Self::new(h[0] / 2.0, h[1] / 2.0, h[2] / 2.0)
    }

    pub fn matrix(self) -> Mat4 {
        canonical_gate(self.c1, self.c2, self.c3)
    }

    /// Chamber membership `π/4 ≥ c1 ≥ c2 ≥ |c3| ≥ 0` with slack `tol`.
    pub fn is_normalized(self, tol: f64) -> bool {
        FRAC_PI_4 + tol >= self.c1
            && self.c1 + tol >= self.c2
            && self.c2 + tol >= self.c3.abs()
    }

    /// Mirror image across the `c1 = π/4` face, `(π/2 − c1, c2, −c3)`.
    pub fn face_reflection(self) -> Self {
        Self::new(FRAC_PI_2 - self.c1, self.c2, -self.c3)
    }

    /// Componentwise max distance between two normalized points, taking the
    /// face identification into account.
    pub fn distance(self, other: Self) -> f64 {
        let direct = max_abs(self.to_array(), other.to_array());
        let across = max_abs(self.to_array(), other.face_reflection().to_array());
        direct.min(across)
    }

    /// Coordinates in units of π/4.
    pub fn in_quarter_pi(self) -> [f64; 3] {
        self.to_array().map(|c| c / FRAC_PI_4)
    }
}

fn max_abs(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Result of [`weyl_normalize`]: `U_d(raw) = e^{i·phase} · post · U_d(coords) · pre`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Normalized {
    pub coords: CanonicalCoords,
    pub post: LocalLayer,
    pub pre: LocalLayer,
    pub phase: f64,
}

/// Single-qubit Clifford `C` with `C σ_i C† = ±σ_j` and `C σ_j C† = ±σ_i`,
/// fixing the third axis up to sign.
fn axis_swap_clifford(i: usize, j: usize) -> Mat2 {
    match (i.min(j), i.max(j)) {
        (1, 2) => Mat2::phase_s(),
        (1, 3) => Mat2::hadamard(),
        (2, 3) => crate::matcore::rot_x(-FRAC_PI_2),
        _ => panic!("no axis swap for ({i}, {j})"),
    }
}

struct Dressing {
    c: [f64; 3],
    post: LocalLayer,
    pre: LocalLayer,
    phase: f64,
}

impl Dressing {
    /// `c_axis ← c_axis − k·π/2`, using `U_d(c) = i^k U_d(c′) (σ⊗σ)^k`.
    fn shift(&mut self, axis: usize, k: i64) {
        if k == 0 {
            return;
        }
        self.c[axis] -= k as f64 * FRAC_PI_2;
        if k.rem_euclid(2) == 1 {
            self.pre = LocalLayer::both(Mat2::pauli(axis + 1)) * self.pre;
        }
        self.phase += k as f64 * FRAC_PI_2;
    }

    /// Exchanges coordinates `i` and `j` via `U_d(c) = (C⊗C)† U_d(c′) (C⊗C)`.
    fn swap(&mut self, i: usize, j: usize) {
        let cl = axis_swap_clifford(i + 1, j + 1);
        self.c.swap(i, j);
        self.post = self.post * LocalLayer::both(cl.adjoint());
        self.pre = LocalLayer::both(cl) * self.pre;
    }

    /// Negates the two coordinates other than `keep` via `σ_keep ⊗ I`.
    fn flip_pair(&mut self, keep: usize) {
        let p = LocalLayer::new(Mat2::pauli(keep + 1), Mat2::identity());
        for (idx, c) in self.c.iter_mut().enumerate() {
            if idx != keep {
                *c = -*c;
            }
        }
        self.post = self.post * p;
        self.pre = p * self.pre;
    }
}

/// Maps arbitrary coordinates into the Weyl chamber, returning the local
/// dressings relating the two canonical gates.
///
/// Only three moves are used: shifts of one coordinate by a multiple of
/// π/2 (a Pauli-pair dressing plus a phase), exchanges of two coordinates
/// (a Clifford applied to both qubits) and simultaneous sign flips of two
/// coordinates (a Pauli on qubit A).
pub fn weyl_normalize(raw: [f64; 3]) -> Normalized {
    let mut d = Dressing {
        c: raw,
        post: LocalLayer::identity(),
        pre: LocalLayer::identity(),
        phase: 0.0,
    };
    // into (−π/4, π/4]
    for axis in 0..3 {
        let k = ((d.c[axis] - FRAC_PI_4) / FRAC_PI_2).ceil() as i64;
        d.shift(axis, k);
    }
    // descending by magnitude
    for _ in 0..2 {
        for i in 0..2 {
            if d.c[i].abs() < d.c[i + 1].abs() {
                d.swap(i, i + 1);
            }
        }
    }
    match (d.c[0] < 0.0, d.c[1] < 0.0) {
        (true, true) => d.flip_pair(2),
        (true, false) => d.flip_pair(1),
        (false, true) => d.flip_pair(0),
        (false, false) => {}
    }
    if d.c[0] >= FRAC_PI_4 - FACE_SLACK && d.c[2] < 0.0 {
        d.shift(0, 1);
        d.flip_pair(1);
    }
    for c in d.c.iter_mut() {
        if *c == 0.0 {
            *c = 0.0;
        }
    }
    Normalized {
        coords: CanonicalCoords::from_array(d.c),
        post: d.post,
        pre: d.pre,
        phase: d.phase,
    }
}

/// `U = e^{i·phase} · (post.a ⊗ post.b) · U_d(coords) · (pre.a ⊗ pre.b)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KakDecomposition {
    pub phase: f64,
    pub pre: LocalLayer,
    pub coords: CanonicalCoords,
    pub post: LocalLayer,
}

impl KakDecomposition {
    pub fn reconstruct(&self) -> Mat4 {
        (self.post.to_mat4() * self.coords.matrix() * self.pre.to_mat4()).with_phase(self.phase)
    }

    /// Max-norm reconstruction error against `u`.
    pub fn residual(&self, u: &Mat4) -> f64 {
        self.reconstruct().max_abs_diff(u)
    }
}

/// Scales `u` into SU(4). Returns the scaled matrix and `φ` with
/// `u = e^{iφ} · result`.
fn to_special4(u: &Mat4) -> (Mat4, f64) {
    let phase = u.det().arg() / 4.0;
    (u.with_phase(-phase), phase)
}

/// Real orthogonal `P` (det +1) diagonalizing the complex symmetric unitary
/// `m`, together with the diagonal entries of `Pᵀ m P`.
///
/// `m = A + iB` with `A`, `B` real symmetric and commuting, so a generic
/// real combination `xA + yB` shares their eigenbasis. Degenerate
/// eigenspaces of `m` are handled automatically: inside them any real
/// orthonormal basis works.
fn real_eigenbasis(m: &Mat4) -> (Matrix4<f64>, [Complex64; 4]) {
    let re = Matrix4::from_fn(|i, j| 0.5 * (m.0[i][j].re + m.0[j][i].re));
    let im = Matrix4::from_fn(|i, j| 0.5 * (m.0[i][j].im + m.0[j][i].im));
    // fixed generic weights; the first pair almost always succeeds
    const WEIGHTS: [(f64, f64); 8] = [
        (0.8156, 0.5786),
        (0.3719, -0.9283),
        (-0.6128, 0.7902),
        (0.9403, 0.3404),
        (0.1537, 0.9881),
        (-0.4402, -0.8979),
        (0.7071, -0.7071),
        (0.2588, 0.9659),
    ];
    let mut best: Option<(f64, Matrix4<f64>, [Complex64; 4])> = None;
    for (x, y) in WEIGHTS {
        let eig = (re * x + im * y).symmetric_eigen();
        let mut p = eig.eigenvectors;
        if p.determinant() < 0.0 {
            p.column_mut(0).neg_mut();
        }
        let dr = p.transpose() * re * p;
        let di = p.transpose() * im * p;
        let mut off = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    off = off.max(dr[(i, j)].abs()).max(di[(i, j)].abs());
                }
            }
        }
        let diag = [0, 1, 2, 3].map(|k| Complex64::new(dr[(k, k)], di[(k, k)]));
        if best.as_ref().is_none_or(|(b, _, _)| off < *b) {
            best = Some((off, p, diag));
        }
        if off < 1e-12 {
            break;
        }
    }
    let (_, p, diag) = best.unwrap();
    (p, diag)
}

fn real_to_mat4(p: &Matrix4<f64>) -> Mat4 {
    Mat4::from_fn(|i, j| Complex64::new(p[(i, j)], 0.0))
}

/// Raw (unnormalized) KAK: `u = e^{iφ} · L1 · U_d(raw) · L0` with `L0`, `L1`
/// local.
fn kak_raw(u: &Mat4) -> (f64, LocalLayer, [f64; 3], LocalLayer) {
    let mb = MagicBasis::new();
    let (su, phase0) = to_special4(u);
    let um = mb.to_magic(&su);
    let m = um.transpose() * um;
    let (p, diag) = real_eigenbasis(&m);

    let mut theta = diag.map(|z| z.arg() / 2.0);
    // det(M) = 1 makes Σθ a multiple of π; pin it to zero so that
    // diag(e^{iθ}) is exactly a canonical gate and K1 lands in SO(4).
    let k = (theta.iter().sum::<f64>() / PI).round();
    theta[0] -= k * PI;

    let p4 = real_to_mat4(&p);
    let inv_sqrt = Mat4::diagonal(theta.map(|t| Complex64::from_polar(1.0, -t)));
    let k1 = um * p4 * inv_sqrt;
    let (left, ph1) = LocalLayer::factor(&mb.from_magic(&k1));
    let (right, ph2) = LocalLayer::factor(&mb.from_magic(&p4.transpose()));

    let [l1, l2, _, l4] = theta;
    let raw = [(l1 + l2) / 2.0, (l2 + l4) / 2.0, (l1 + l4) / 2.0];
    (phase0 + ph1 + ph2, left, raw, right)
}

/// KAK decomposition with the default unitarity tolerance.
pub fn kak(u: &Mat4) -> Result<KakDecomposition> {
    kak_with(u, &Tolerances::default())
}

pub fn kak_with(u: &Mat4, tol: &Tolerances) -> Result<KakDecomposition> {
    u.ensure_unitary(tol.unitarity)?;
    let (phase, left, raw, right) = kak_raw(u);
    let n = weyl_normalize(raw);
    let (post, p_post) = (left * n.post).to_special();
    let (pre, p_pre) = (n.pre * right).to_special();
    Ok(KakDecomposition {
        phase: wrap_phase(phase + n.phase + p_post + p_pre),
        pre,
        coords: n.coords,
        post,
    })
}

/// Normalized canonical coordinates of `u`.
pub fn coords_of(u: &Mat4) -> Result<CanonicalCoords> {
    kak(u).map(|k| k.coords)
}

/// Angle reduced to `(−π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

fn circular_gap(a: f64, b: f64) -> f64 {
    wrap_phase(a - b).abs()
}

/// Eigenphase multiset of `M = U_mᵀ U_m`, with `U_m` the magic-basis form
/// of `u` scaled into SU(4).
///
/// The SU(4) scaling is fixed only up to a fourth root of unity, which
/// shifts every phase by π. Of the two candidate sets the one with the
/// smaller total magnitude is stored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalInvariant {
    pub phases: [f64; 4],
}

impl LocalInvariant {
    fn canonical(phases: [f64; 4]) -> Self {
        let pick = |shift: f64| {
            let mut p = phases.map(|x| wrap_phase(x + shift));
            p.sort_by(f64::total_cmp);
            p
        };
        let a = pick(0.0);
        let b = pick(PI);
        let weight = |p: &[f64; 4]| p.iter().map(|x| x.abs()).sum::<f64>();
        let chosen = if weight(&b) + 1e-12 < weight(&a) { b } else { a };
        Self { phases: chosen }
    }

    /// Invariant predicted from canonical coordinates: `{2λ_j}`.
    pub fn from_coords(c: CanonicalCoords) -> Self {
        Self::canonical(magic_eigenphases(c.to_array()).map(|l| 2.0 * l))
    }

    /// Largest phase gap under the best matching of the two multisets,
    /// allowing the common π shift.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut best = f64::INFINITY;
        for shift in [0.0, PI] {
            for perm in PERMS4 {
                let gap = (0..4)
                    .map(|k| circular_gap(self.phases[k], other.phases[perm[k]] + shift))
                    .fold(0.0, f64::max);
                best = best.min(gap);
            }
        }
        best
    }
}

const PERMS4: [[usize; 4]; 24] = [
    [0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 1, 3], [0, 2, 3, 1], [0, 3, 1, 2], [0, 3, 2, 1],
    [1, 0, 2, 3], [1, 0, 3, 2], [1, 2, 0, 3], [1, 2, 3, 0], [1, 3, 0, 2], [1, 3, 2, 0],
    [2, 0, 1, 3], [2, 0, 3, 1], [2, 1, 0, 3], [2, 1, 3, 0], [2, 3, 0, 1], [2, 3, 1, 0],
    [3, 0, 1, 2], [3, 0, 2, 1], [3, 1, 0, 2], [3, 1, 2, 0], [3, 2, 0, 1], [3, 2, 1, 0],
];

pub fn local_invariant(u: &Mat4) -> Result<LocalInvariant> {
    u.ensure_unitary(Tolerances::default().unitarity)?;
    let mb = MagicBasis::new();
    let (su, _) = to_special4(u);
    let um = mb.to_magic(&su);
    let (_, diag) = real_eigenbasis(&(um.transpose() * um));
    Ok(LocalInvariant::canonical(diag.map(|z| z.arg())))
}

/// True when the normalized coordinates of `u` and `v` agree within `tol`.
pub fn is_locally_equivalent(u: &Mat4, v: &Mat4, tol: f64) -> Result<bool> {
    let cu = coords_of(u)?;
    let cv = coords_of(v)?;
    Ok(cu.distance(cv) <= tol)
}

/// Coordinates of the mirror class: every coordinate shifted by π/4, then
/// normalized.
pub fn mirror_coords(c: CanonicalCoords) -> CanonicalCoords {
    weyl_normalize([c.c1 + FRAC_PI_4, c.c2 + FRAC_PI_4, c.c3 + FRAC_PI_4]).coords
}

/// `U_d(π/4, π/4, π/4) · u`, i.e. `e^{iπ/4} SWAP · u`.
pub fn mirror_of(u: &Mat4) -> Result<Mat4> {
    u.ensure_unitary(Tolerances::default().unitarity)?;
    Ok(canonical_gate(FRAC_PI_4, FRAC_PI_4, FRAC_PI_4) * *u)
}

/// Local layers `post`, `pre` and phase with
/// `target ≈ e^{i·phase} · post · product · pre`, for two gates with equal
/// canonical coordinates.
///
/// Fails with [`Error::ConstructionMismatch`] when the coordinates differ
/// by more than `tol`.
pub fn align_locally(product: &Mat4, target: &Mat4, tol: f64) -> Result<(f64, LocalLayer, LocalLayer)> {
    let kp = kak(product)?;
    let kt = kak(target)?;
    let direct = max_abs(kp.coords.to_array(), kt.coords.to_array());
    let across = max_abs(kp.coords.to_array(), kt.coords.face_reflection().to_array());
    let gap = direct.min(across);
    if gap > tol {
        return Err(Error::ConstructionMismatch(gap));
    }
    // target = e^{iφt} Pt · U_d(ct) · Qt and product = e^{iφp} Pp · U_d(cp) · Qp.
    // When the product lands on the other face representative, rewrite
    // U_d(ct) through the reflection identity first.
    let (mut phase, mut post_t, mut pre_t) = (kt.phase, kt.post, kt.pre);
    if across < direct {
        let reflected = weyl_reflect_dressing(kt.coords);
        phase += reflected.phase;
        post_t = post_t * reflected.post;
        pre_t = reflected.pre * pre_t;
    }
    let post = post_t * kp.post.adjoint();
    let pre = kp.pre.adjoint() * pre_t;
    let mut phase = phase - kp.phase;
    // Settle the global phase against the actual matrices.
    let approx = (post.to_mat4() * *product * pre.to_mat4()).with_phase(phase);
    phase += crate::matcore::relative_phase(&approx, target);
    Ok((wrap_phase(phase), post, pre))
}

/// Dressing for `U_d(c) = e^{iφ} post · U_d(π/2 − c1, c2, −c3) · pre`.
fn weyl_reflect_dressing(c: CanonicalCoords) -> Normalized {
    // U_d(c) = U_d(c1 − π/2, c2, c3) · i(σ1⊗σ1)
    //        = (σ2⊗I) U_d(π/2 − c1, c2, −c3) (σ2⊗I) · i(σ1⊗σ1)
    let p = LocalLayer::new(Mat2::pauli_y(), Mat2::identity());
    let x = LocalLayer::both(Mat2::pauli_x());
    Normalized {
        coords: c.face_reflection(),
        post: p,
        pre: p * x,
        phase: FRAC_PI_2,
    }
}
