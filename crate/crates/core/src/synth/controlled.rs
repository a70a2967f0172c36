use std::f64::consts::{FRAC_PI_2, PI};

use super::circuit::{BaseGate, Circuit};
use super::compose::solve_locals_t5;
use crate::canonical::weyl_normalize;
use crate::error::{Error, Result};
use crate::matcore::{canonical_gate, controlled_gate, rot_y, LocalLayer, Mat2};

/// Slack for precondition checks on target coordinates.
pub(crate) const SLACK: f64 = 1e-9;

fn require(ok: bool, constraint: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::OutOfRegion {
            constraint: constraint.to_string(),
        })
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    BaseGate::Controlled { gamma }.validate()
}

/// `U_d(h1/2, h2/2, h3/2)`.
fn doubled_gate(h: [f64; 3]) -> crate::Mat4 {
    canonical_gate(h[0] / 2.0, h[1] / 2.0, h[2] / 2.0)
}

/// Doubled normalized coordinates of `U_d(h/2)`.
fn normalized_doubled(h: [f64; 3]) -> [f64; 3] {
    weyl_normalize([h[0] / 2.0, h[1] / 2.0, h[2] / 2.0]).coords.doubled()
}

/// Two controlled gates, `γ2` first, joined by `R_y(s1) ⊗ R_y(s2)`, aligned
/// to evaluate exactly to `U_d(h1/2, h2/2, 0)`.
pub fn synth_two_controlled(h1: f64, h2: f64, gamma1: f64, gamma2: f64) -> Result<Circuit> {
    check_gamma(gamma1)?;
    check_gamma(gamma2)?;
    if gamma2 > gamma1 {
        return Err(Error::DomainError(format!(
            "expected γ1 ≥ γ2, got γ1 = {gamma1}, γ2 = {gamma2}"
        )));
    }
    require(h2 >= -SLACK, "h2 ≥ 0")?;
    require(h1 >= h2 - SLACK, "h1 ≥ h2")?;
    require(h1 <= FRAC_PI_2 + SLACK, "h1 ≤ π/2")?;
    require(gamma1 - gamma2 <= h1 - h2 + SLACK, "γ1−γ2 ≤ h1−h2")?;
    require(h1 + h2 <= gamma1 + gamma2 + SLACK, "h1+h2 ≤ nγ")?;

    let (s1, s2) = solve_locals_t5([0.0, 0.0, gamma1], [0.0, 0.0, gamma2], h1 + h2, h1 - h2)?;
    let layers = vec![
        LocalLayer::identity(),
        LocalLayer::new(rot_y(s1), rot_y(s2)),
        LocalLayer::identity(),
    ];
    let gates = vec![
        BaseGate::Controlled { gamma: gamma2 },
        BaseGate::Controlled { gamma: gamma1 },
    ];
    Circuit::from_slots(0.0, layers, gates, BaseGate::Controlled { gamma: gamma1 })
        .aligned_to(&canonical_gate(h1 / 2.0, h2 / 2.0, 0.0))
}

/// `n` applications of `Controlled(γ)` evaluating to `U_d(h1/2, h2/2, 0)`.
pub fn synth_controlled_n(h1: f64, h2: f64, gamma: f64, n: usize) -> Result<Circuit> {
    check_gamma(gamma)?;
    if n < 2 {
        return Err(Error::DomainError(format!("n = {n}, need at least 2")));
    }
    require(h2 >= -SLACK, "h2 ≥ 0")?;
    require(h1 >= h2 - SLACK, "h1 ≥ h2")?;
    require(h1 <= FRAC_PI_2 + SLACK, "h1 ≤ π/2")?;
    require(h1 + h2 <= n as f64 * gamma + SLACK, "h1+h2 ≤ nγ")?;
    controlled_pair_class(h1, h2, gamma, n)
}

/// Two applications of `Controlled(γ)` that evaluate to the gate itself.
fn self_simulation(gamma: f64) -> Result<Circuit> {
    synth_two_controlled(gamma, 0.0, gamma, gamma)?.aligned_to(&controlled_gate(gamma))
}

/// Recursive core of [`synth_controlled_n`]; inputs are already checked.
fn controlled_pair_class(h1: f64, h2: f64, gamma: f64, n: usize) -> Result<Circuit> {
    if n == 2 {
        return synth_two_controlled(h1, h2, gamma, gamma);
    }
    let budget = (n - 1) as f64 * gamma;
    if h1 + h2 <= budget + SLACK {
        // One application more than needed: let two applications stand in
        // for one.
        let shorter = controlled_pair_class(h1, h2, gamma, n - 1)?;
        return shorter.splice(0, self_simulation(gamma)?);
    }
    // Peel U_d(γ/2, 0, 0) = (H⊗H) · controlled(γ) · (H⊗H) off the first
    // coordinate and build the remainder from n − 1 applications.
    let rest = [h1 - gamma, h2, 0.0];
    let [p, q, _] = normalized_doubled(rest);
    let inner = controlled_pair_class(p, q, gamma, n - 1)?.aligned_to(&doubled_gate(rest))?;
    let hh = LocalLayer::both(Mat2::hadamard());
    let peel = Circuit::with_layers(BaseGate::Controlled { gamma }, vec![hh, hh]);
    Ok(inner.then(peel))
}

/// `n ≥ 4` applications of `Controlled(γ)` evaluating to
/// `U_d(h1/2, h2/2, h3/2)`, as the product of two commuting factors built
/// from `⌈n/3⌉` and `n − ⌈n/3⌉` applications.
pub fn synth_controlled_t4(h1: f64, h2: f64, h3: f64, gamma: f64, n: usize) -> Result<Circuit> {
    check_gamma(gamma)?;
    if n < 4 {
        return Err(Error::DomainError(format!("n = {n}, need at least 4")));
    }
    require(h2 >= h3.abs() - SLACK, "|h3| ≤ h2")?;
    require(h1 >= h2 - SLACK, "h1 ≥ h2")?;
    require(h1 <= FRAC_PI_2 + SLACK, "h1 ≤ π/2")?;
    require(h1 + h2 + h3.abs() <= n as f64 * gamma + SLACK, "h1+h2+|h3| ≤ nγ")?;

    let m = n.div_ceil(3);
    let mg = m as f64 * gamma;
    let f1 = [mg - h3.abs(), 0.0, h3];
    let f2 = [h1 - mg + h3.abs(), h2, 0.0];
    let first = factor_circuit(f1, gamma, m)?;
    let second = factor_circuit(f2, gamma, n - m)?;
    Ok(second.then(first))
}

/// `k` applications evaluating exactly to `U_d(h/2)`, for an `h` whose
/// class has a zero third coordinate.
fn factor_circuit(h: [f64; 3], gamma: f64, k: usize) -> Result<Circuit> {
    let [p, q, r] = normalized_doubled(h);
    if r.abs() > SLACK {
        return Err(Error::Infeasible(format!("factor class has h3 = {r}")));
    }
    require(p + q <= k as f64 * gamma + SLACK, "h1+h2 ≤ nγ")?;
    controlled_pair_class(p, q.max(0.0), gamma, k)?.aligned_to(&doubled_gate(h))
}

/// Three applications of `Controlled(γ)` evaluating to
/// `U_d(h1/2, h2/2, h3/2)`: two of them build `U_d(c1/2, h3/2, 0)`, the
/// third is joined through `R_y(s1) ⊗ R_y(s2)`.
pub fn synth_controlled_t6(h1: f64, h2: f64, h3: f64, gamma: f64) -> Result<Circuit> {
    check_gamma(gamma)?;
    let cap = (3.0 * gamma - h3.abs()).min(PI);
    require(h1 - h2 >= -SLACK && h1 - h2 <= cap + SLACK, "0 ≤ h1−h2 ≤ min(3γ−|h3|, π)")?;
    require(h1 + h2 >= -SLACK && h1 + h2 <= cap + SLACK, "0 ≤ h1+h2 ≤ min(3γ−|h3|, π)")?;
    require(h2.abs() <= gamma + SLACK, "|h2| ≤ γ")?;
    require(h3.abs() <= h2 + SLACK, "|h3| ≤ h2")?;

    let lo = gamma.max(h1 + h2 - gamma).max(h1 - h2 - gamma);
    let hi = (2.0 * gamma - h3.abs())
        .min(PI - gamma)
        .min(h1 + h2 + gamma)
        .min(h1 - h2 + gamma);
    if lo > hi + SLACK {
        return Err(Error::Infeasible(format!("empty c1 interval [{lo}, {hi}]")));
    }
    let c1 = (lo + hi.max(lo)) / 2.0;

    let inner = [c1, h3, 0.0];
    let [p, q, _] = normalized_doubled(inner);
    let pair = synth_two_controlled(p, q, gamma, gamma)?.aligned_to(&doubled_gate(inner))?;
    let (s1, s2) = solve_locals_t5(inner, [0.0, 0.0, gamma], h1 + h2, h1 - h2)?;
    let head = Circuit::with_layers(
        BaseGate::Controlled { gamma },
        vec![LocalLayer::identity(), LocalLayer::new(rot_y(s1), rot_y(s2))],
    );
    head.then(pair).aligned_to(&doubled_gate([h1, h2, h3]))
}

/// `⌈3π/(2γ)⌉`, the number of `Controlled(γ)` applications that suffice
/// for any two-qubit gate.
pub fn universal_budget(gamma: f64) -> Result<usize> {
    if !(gamma > 0.0 && gamma <= FRAC_PI_2 + 1e-12) {
        return Err(Error::DomainError(format!("γ = {gamma} outside (0, π/2]")));
    }
    // The guard keeps exact divisors such as γ = π/4 from rounding up.
    Ok((3.0 * PI / (2.0 * gamma) - 1e-9).ceil() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::coords_of;
    use crate::matcore::{distance_up_to_phase, Mat4};
    use crate::CanonicalCoords;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    fn assert_exact(c: &Circuit, target: &Mat4) {
        let m = c.evaluate().unwrap();
        let d = distance_up_to_phase(&m, target);
        assert!(d <= 1e-8, "distance {d}");
        assert!(m.max_abs_diff(target) < 1e-7, "entrywise {}", m.max_abs_diff(target));
    }

    fn count_controlled(c: &Circuit, gamma: f64) -> usize {
        c.gates()
            .iter()
            .filter(|g| matches!(g, BaseGate::Controlled { gamma: x } if (*x - gamma).abs() < 1e-15))
            .count()
    }

    #[test]
    fn two_cnots_reach_dcnot_class() {
        let c = synth_two_controlled(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2, FRAC_PI_2).unwrap();
        assert_eq!(c.n(), 2);
        assert!(c.overrides.is_empty());
        let coords = coords_of(&c.evaluate().unwrap()).unwrap();
        assert!(coords.distance(CanonicalCoords::new(FRAC_PI_4, FRAC_PI_4, 0.0)) < 1e-7);
        assert_exact(&c, &canonical_gate(FRAC_PI_4, FRAC_PI_4, 0.0));
    }

    #[test]
    fn two_gates_simulate_identity() {
        let c = synth_two_controlled(0.0, 0.0, 0.6, 0.6).unwrap();
        assert_exact(&c, &Mat4::identity());
    }

    #[test]
    fn boundary_sum_uses_aligned_local_angles() {
        // h1+h2 = γ1+γ2 with h2 = 0 needs the gates to add outright.
        let (g1, g2) = (0.5, 0.3);
        let (s1, s2) = solve_locals_t5([0.0, 0.0, g1], [0.0, 0.0, g2], g1 + g2, g1 + g2).unwrap();
        assert!((s1 - s2).abs() < 1e-6, "s1 − s2 = {}", s1 - s2);
        let c = synth_two_controlled(g1 + g2, 0.0, g1, g2).unwrap();
        assert_exact(&c, &canonical_gate((g1 + g2) / 2.0, 0.0, 0.0));
    }

    #[test]
    fn unequal_gammas_use_per_slot_gates() {
        let c = synth_two_controlled(0.6, 0.3, 0.7, 0.4).unwrap();
        assert_eq!(c.overrides.len(), 2);
        assert_eq!(c.gate_at(0), &BaseGate::Controlled { gamma: 0.4 });
        assert_eq!(c.gate_at(1), &BaseGate::Controlled { gamma: 0.7 });
        assert_exact(&c, &canonical_gate(0.3, 0.15, 0.0));
    }

    #[test]
    fn two_gate_region_violations_are_named() {
        let e = synth_two_controlled(0.4, 0.3, 0.2, 0.2).unwrap_err();
        assert!(matches!(e, Error::OutOfRegion { ref constraint } if constraint == "h1+h2 ≤ nγ"));
        let e = synth_two_controlled(0.5, 0.45, 0.5, 0.1).unwrap_err();
        assert!(matches!(e, Error::OutOfRegion { ref constraint } if constraint == "γ1−γ2 ≤ h1−h2"));
        assert!(matches!(synth_two_controlled(0.2, 0.3, 0.5, 0.5), Err(Error::OutOfRegion { .. })));
    }

    #[test]
    fn n_two_matches_two_gate_construction() {
        let a = synth_controlled_n(0.7, 0.2, 0.5, 2).unwrap();
        let b = synth_two_controlled(0.7, 0.2, 0.5, 0.5).unwrap();
        assert!(a.evaluate().unwrap().max_abs_diff(&b.evaluate().unwrap()) < 1e-12);
    }

    #[test]
    fn three_cnots_with_padding_reach_dcnot_class() {
        let c = synth_controlled_n(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2, 3).unwrap();
        assert_eq!(c.n(), 3);
        assert_eq!(count_controlled(&c, FRAC_PI_2), 3);
        assert_exact(&c, &canonical_gate(FRAC_PI_4, FRAC_PI_4, 0.0));
    }

    #[test]
    fn four_quarter_pi_gates_reach_dcnot_class() {
        let c = synth_controlled_n(FRAC_PI_2, FRAC_PI_2, FRAC_PI_4, 4).unwrap();
        assert_eq!(c.n(), 4);
        assert_eq!(count_controlled(&c, FRAC_PI_4), 4);
        assert_exact(&c, &canonical_gate(FRAC_PI_4, FRAC_PI_4, 0.0));
    }

    #[test]
    fn controlled_n_rejects_over_budget() {
        let e = synth_controlled_n(0.4, 0.3, 0.2, 3).unwrap_err();
        assert!(matches!(e, Error::OutOfRegion { ref constraint } if constraint == "h1+h2 ≤ nγ"));
    }

    #[test]
    fn four_cnots_build_swap() {
        let c = synth_controlled_t4(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2, FRAC_PI_2, 4).unwrap();
        assert_eq!(c.n(), 4);
        assert_eq!(count_controlled(&c, FRAC_PI_2), 4);
        assert_exact(&c, &canonical_gate(FRAC_PI_4, FRAC_PI_4, FRAC_PI_4));
    }

    #[test]
    fn t4_with_zero_h3() {
        let c = synth_controlled_t4(1.2, 0.9, 0.0, FRAC_PI_3, 5).unwrap();
        assert_exact(&c, &canonical_gate(0.6, 0.45, 0.0));
    }

    #[test]
    fn t4_negative_h3() {
        let c = synth_controlled_t4(1.3, 0.8, -0.5, FRAC_PI_3, 5).unwrap();
        assert_exact(&c, &canonical_gate(0.65, 0.4, -0.25));
    }

    #[test]
    fn t6_full_chamber_for_cnot() {
        for &(h1, h2, h3) in &[(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2), (FRAC_PI_2, 0.0, 0.0), (1.0, 0.7, -0.3), (0.0, 0.0, 0.0)] {
            let c = synth_controlled_t6(h1, h2, h3, FRAC_PI_2).unwrap();
            assert_eq!(c.n(), 3);
            assert_exact(&c, &canonical_gate(h1 / 2.0, h2 / 2.0, h3 / 2.0));
        }
    }

    #[test]
    fn t6_agrees_with_pair_path() {
        let g = 0.5;
        let a = synth_controlled_t6(1.2, 0.0, 0.0, g).unwrap();
        let b = synth_controlled_n(1.2, 0.0, g, 3).unwrap();
        assert!(distance_up_to_phase(&a.evaluate().unwrap(), &b.evaluate().unwrap()) < 1e-8);
    }

    #[test]
    fn t6_boundary_budget() {
        let g = 0.5;
        let h3 = 0.2;
        let h2 = 0.4;
        let h1 = 3.0 * g - h3 - h2;
        let c = synth_controlled_t6(h1, h2, h3, g).unwrap();
        assert_exact(&c, &canonical_gate(h1 / 2.0, h2 / 2.0, h3 / 2.0));
    }

    #[test]
    fn t6_rejects_outside() {
        assert!(matches!(synth_controlled_t6(1.0, 0.9, 0.0, 0.5), Err(Error::OutOfRegion { .. })));
    }

    #[test]
    fn budget_values() {
        assert_eq!(universal_budget(FRAC_PI_2).unwrap(), 3);
        assert_eq!(universal_budget(FRAC_PI_4).unwrap(), 6);
        assert_eq!(universal_budget(FRAC_PI_3).unwrap(), 5);
        assert_eq!(universal_budget(FRAC_PI_6).unwrap(), 9);
        assert_eq!(universal_budget(1.0).unwrap(), 5);
        assert!(matches!(universal_budget(0.0), Err(Error::DomainError(_))));
        assert!(matches!(universal_budget(2.0), Err(Error::DomainError(_))));
    }

    fn chamber_point(u: f64, v: f64, w: f64) -> [f64; 3] {
        let h1 = u * FRAC_PI_2;
        let h2 = v * h1;
        let h3 = (2.0 * w - 1.0) * h2;
        [h1, h2, h3]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn controlled_n_is_exact(g in 0.2f64..FRAC_PI_2, n in 2usize..6, u in 0.0f64..1.0, v in 0.0f64..1.0) {
            let h1 = u * FRAC_PI_2;
            let h2 = (v * h1).min(n as f64 * g - h1).max(0.0);
            prop_assume!(h1 + h2 <= n as f64 * g);
            let c = synth_controlled_n(h1, h2, g, n).unwrap();
            prop_assert_eq!(c.n(), n);
            prop_assert!(distance_up_to_phase(&c.evaluate().unwrap(), &canonical_gate(h1 / 2.0, h2 / 2.0, 0.0)) < 1e-8);
        }

        #[test]
        fn t4_is_exact(g in 0.3f64..FRAC_PI_2, n in 4usize..8, u in 0.0f64..1.0, v in 0.0f64..1.0, w in 0.0f64..1.0) {
            let [h1, h2, h3] = chamber_point(u, v, w);
            prop_assume!(h1 + h2 + h3.abs() <= n as f64 * g);
            let c = synth_controlled_t4(h1, h2, h3, g, n).unwrap();
            prop_assert_eq!(c.n(), n);
            prop_assert!(distance_up_to_phase(&c.evaluate().unwrap(), &doubled_gate([h1, h2, h3])) < 1e-8);
        }

        #[test]
        fn t6_is_exact_for_cnot(u in 0.0f64..1.0, v in 0.0f64..1.0, w in 0.0f64..1.0) {
            let h = chamber_point(u, v, w);
            let c = synth_controlled_t6(h[0], h[1], h[2], FRAC_PI_2).unwrap();
            prop_assert!(distance_up_to_phase(&c.evaluate().unwrap(), &doubled_gate(h)) < 1e-8);
        }
    }
}
