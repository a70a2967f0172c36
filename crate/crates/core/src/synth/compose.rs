use serde::{Deserialize, Serialize};

use crate::canonical::{weyl_normalize, CanonicalCoords};
use crate::error::{Error, Result};

/// Distance from ±1 treated as rounding noise and snapped onto the endpoint.
const SNAP: f64 = 1e-14;
/// Distance outside [−1, 1] still accepted (and clamped) when solving.
const CLAMP: f64 = 1e-9;
/// Below this the sine product is treated as zero.
const DEGENERATE: f64 = 1e-12;

/// Doubled coordinates `(x, y, z)` of
/// `U_d(a/2) · (R_y(s1) ⊗ R_y(s2)) · U_d(b/2)`, before normalization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComposeResult {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ComposeResult {
    /// Normalized coordinates of the product's class.
    pub fn coords(&self) -> CanonicalCoords {
        weyl_normalize([self.x / 2.0, self.y / 2.0, self.z / 2.0]).coords
    }
}

fn acos_clamped(v: f64) -> f64 {
    v.clamp(-1.0, 1.0).acos()
}

/// Class of `U_d(a/2) · (R_y(s1) ⊗ R_y(s2)) · U_d(b/2)` for doubled
/// coordinates `a = (a1, a2, a3)`, `b = (b1, b2, b3)`:
///
/// ```text
/// cos(x+y) = cos(a1+a3)cos(b1+b3) − cos(s1−s2) sin(a1+a3) sin(b1+b3)
/// cos(x−y) = cos(a1−a3)cos(b1−b3) − cos(s1+s2) sin(a1−a3) sin(b1−b3)
/// z        = a2 + b2
/// ```
///
/// `x ± y` are taken in `[0, π]`.
pub fn compose_t5(a: [f64; 3], b: [f64; 3], s1: f64, s2: f64) -> ComposeResult {
    let (ap, am) = (a[0] + a[2], a[0] - a[2]);
    let (bp, bm) = (b[0] + b[2], b[0] - b[2]);
    let sum = acos_clamped(ap.cos() * bp.cos() - (s1 - s2).cos() * ap.sin() * bp.sin());
    let diff = acos_clamped(am.cos() * bm.cos() - (s1 + s2).cos() * am.sin() * bm.sin());
    ComposeResult {
        x: (sum + diff) / 2.0,
        y: (sum - diff) / 2.0,
        z: a[1] + b[1],
    }
}

/// Solves `cos(target) = cos(p)cos(q) − cos(d) sin(p) sin(q)` for `d ∈ [0, π]`.
fn solve_one(p: f64, q: f64, target: f64, which: &str) -> Result<f64> {
    let num = p.cos() * q.cos() - target.cos();
    let den = p.sin() * q.sin();
    if den.abs() < DEGENERATE {
        return if num.abs() <= CLAMP {
            Ok(0.0)
        } else {
            Err(Error::Infeasible(format!(
                "{which}: target {target} unreachable, the factor angles are degenerate"
            )))
        };
    }
    let r = num / den;
    if r.abs() > 1.0 + CLAMP {
        return Err(Error::Infeasible(format!(
            "{which}: cos = {r} outside [-1, 1] for target {target}"
        )));
    }
    let r = if 1.0 - r.abs() < SNAP { r.signum() } else { r };
    Ok(acos_clamped(r))
}

/// Angles `(s1, s2)` for which [`compose_t5`] with `a`, `b` yields
/// `x + y = target_sum` and `x − y = target_diff`.
pub fn solve_locals_t5(a: [f64; 3], b: [f64; 3], target_sum: f64, target_diff: f64) -> Result<(f64, f64)> {
    let d = solve_one(a[0] + a[2], b[0] + b[2], target_sum, "x+y")?;
    let e = solve_one(a[0] - a[2], b[0] - b[2], target_diff, "x-y")?;
    Ok(((e + d) / 2.0, (e - d) / 2.0))
}
