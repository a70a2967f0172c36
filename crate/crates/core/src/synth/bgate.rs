use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8};

use super::circuit::{BaseGate, Circuit};
use super::compose::solve_locals_t5;
use crate::error::{Error, Result};
use crate::matcore::{canonical_gate, rot_y, LocalLayer, Mat2};

const SLACK: f64 = 1e-9;

/// Whether two applications of `U_d(a1/2, 0, a3/2)` can build the B gate
/// `U_d(π/4, π/8, 0)`.
pub fn t7_feasible(a1: f64, a3: f64) -> bool {
    (2.0 * a1 + 2.0 * a3).cos() <= -FRAC_1_SQRT_2 + SLACK
        && (2.0 * a1 - 2.0 * a3).cos() <= FRAC_1_SQRT_2 + SLACK
}

/// Two applications of `U1 = U_d(a1/2, 0, a3/2)` evaluating exactly to the
/// B gate. The first application is conjugated by `H ⊗ H`, which turns it
/// into `U2 = U_d(a3/2, 0, a1/2)`; the circuit is `U1 · (R_y(s1) ⊗ R_y(s2)) · U2`.
pub fn synth_b_from_t7(a1: f64, a3: f64) -> Result<Circuit> {
    if !t7_feasible(a1, a3) {
        return Err(Error::Infeasible(format!(
            "need cos(2a1+2a3) ≤ −1/√2 and cos(2a1−2a3) ≤ 1/√2, got a1 = {a1}, a3 = {a3}"
        )));
    }
    let (s1, s2) = solve_locals_t5([a1, 0.0, a3], [a3, 0.0, a1], 3.0 * FRAC_PI_4, FRAC_PI_4)?;
    let hh = LocalLayer::both(Mat2::hadamard());
    let base = BaseGate::Custom(canonical_gate(a1 / 2.0, 0.0, a3 / 2.0));
    Circuit::with_layers(
        base,
        vec![hh, LocalLayer::new(rot_y(s1), rot_y(s2)) * hh, LocalLayer::identity()],
    )
    .aligned_to(&canonical_gate(FRAC_PI_4, FRAC_PI_8, 0.0))
}
