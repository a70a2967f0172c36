use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use super::circuit::{BaseGate, Circuit, ALIGN_TOL};
use crate::canonical::align_locally;
use crate::error::{Error, Result};
use crate::matcore::{canonical_gate, relative_phase, rot_z, LocalLayer, MagicBasis, Mat2, Mat4};

fn check_alpha(alpha2: f64) -> Result<()> {
    if (-1e-12..=FRAC_PI_4 + 1e-12).contains(&alpha2) {
        Ok(())
    } else {
        Err(Error::DomainError(format!("α2 = {alpha2} outside [0, π/4]")))
    }
}

fn outer(out: [Complex64; 4], inp: [Complex64; 4]) -> Mat4 {
    Mat4::from_fn(|i, j| out[i] * inp[j].conj())
}

/// The three gates `U_A`, `U_B`, `U_C`, each locally equivalent to
/// `U_d(π/4, α2, 0)`:
///
/// * `U_A |Φ_j⟩ = |00⟩, |01⟩, |10⟩, e^{4iα2}|11⟩`
/// * `U_B` sends `|00⟩ → c|00⟩ + s|10⟩`, `|01⟩ → |01⟩`, `|10⟩ → e^{8iα2}|11⟩`,
///   `|11⟩ → s|00⟩ − c|10⟩`
/// * `U_C` sends `c|00⟩ + s|10⟩ → |Φ1⟩`, `|01⟩ → |Φ2⟩`,
///   `|11⟩ → e^{−4iα2}|Φ3⟩`, `s|00⟩ − c|10⟩ → |Φ4⟩`
///
/// with `c = cos 2α2`, `s = sin 2α2`.
pub fn build_uabc(alpha2: f64) -> Result<(Mat4, Mat4, Mat4)> {
    check_alpha(alpha2)?;
    let q = MagicBasis::new();
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let (c, s) = ((2.0 * alpha2).cos().into(), (2.0 * alpha2).sin().into());
    let e = |t: f64| Complex64::from_polar(1.0, t);

    let u_a = Mat4::diagonal([one, one, one, e(4.0 * alpha2)]) * q.q.adjoint();

    let u_b = Mat4::from_columns([
        [c, zero, s, zero],
        [zero, one, zero, zero],
        [zero, zero, zero, e(8.0 * alpha2)],
        [s, zero, -c, zero],
    ]);

    let inputs = [
        [c, zero, s, zero],
        [zero, one, zero, zero],
        [zero, zero, zero, one],
        [s, zero, -c, zero],
    ];
    let phases = [0.0, 0.0, -4.0 * alpha2, 0.0];
    let u_c = (0..4)
        .map(|k| outer(q.state(k).map(|z| z * e(phases[k])), inputs[k]))
        .fold(Mat4::from_fn(|_, _| zero), |acc, m| {
            Mat4::from_fn(|i, j| acc.0[i][j] + m.0[i][j])
        });
    Ok((u_a, u_b, u_c))
}

/// `(φ, post, pre)` with `u = e^{iφ} · post · G · pre`.
fn realize(g: &Mat4, u: &Mat4) -> Result<(f64, LocalLayer, LocalLayer)> {
    align_locally(g, u, ALIGN_TOL)
}

/// Two applications of `SuperControlled(α2)` evaluating to
/// `U_d(h1, h2, 0)`, as `U_A⁻¹ · (e^{ih1σ3} ⊗ e^{−ih2σ3}) · U_A`.
pub fn synth_supercontrolled2(h1: f64, h2: f64, alpha2: f64) -> Result<Circuit> {
    let (u_a, _, _) = build_uabc(alpha2)?;
    let base = BaseGate::SuperControlled { alpha2 };
    let g = base.matrix();
    let (pa, post_a, pre_a) = realize(&g, &u_a)?;
    let (pi, post_i, pre_i) = realize(&g, &u_a.adjoint())?;
    let z = LocalLayer::new(rot_z(2.0 * h1), rot_z(-2.0 * h2));
    let circuit = Circuit {
        phase: pa + pi,
        layers: vec![pre_a, pre_i * z * post_a, post_i],
        base,
        overrides: Vec::new(),
    };
    let fix = relative_phase(&circuit.evaluate()?, &canonical_gate(h1, h2, 0.0));
    Ok(Circuit {
        phase: circuit.phase + fix,
        ..circuit
    })
}

/// Three applications of `SuperControlled(α2)` evaluating to
/// `U_d(h1, h2, h3)`, as
/// `e^{−2iα2} · U_C · (I ⊗ e^{ih3σ3}) · U_B · (e^{i(h1+2α2)σ3} ⊗ e^{−ih2σ3}) · U_A`.
///
/// The phase is taken directly from that product; no correction is applied.
pub fn synth_supercontrolled3(h1: f64, h2: f64, h3: f64, alpha2: f64) -> Result<Circuit> {
    let (u_a, u_b, u_c) = build_uabc(alpha2)?;
    let base = BaseGate::SuperControlled { alpha2 };
    let g = base.matrix();
    let (pa, post_a, pre_a) = realize(&g, &u_a)?;
    let (pb, post_b, pre_b) = realize(&g, &u_b)?;
    let (pc, post_c, pre_c) = realize(&g, &u_c)?;
    let z12 = LocalLayer::new(rot_z(2.0 * (h1 + 2.0 * alpha2)), rot_z(-2.0 * h2));
    let z3 = LocalLayer::new(Mat2::identity(), rot_z(2.0 * h3));
    Ok(Circuit {
        phase: -2.0 * alpha2 + pa + pb + pc,
        layers: vec![pre_a, pre_b * z12 * post_a, pre_c * z3 * post_b, post_c],
        base,
        overrides: Vec::new(),
    })
}
