//! Circuits of repeated entangling gates and single-qubit layers that
//! realize a requested two-qubit gate.

mod bgate;
mod circuit;
mod compose;
mod controlled;
mod mirror;
mod region;
mod supercontrolled;

use std::f64::consts::FRAC_PI_4;

pub use bgate::{synth_b_from_t7, t7_feasible};
pub use circuit::{BaseGate, Circuit};
pub use compose::{compose_t5, solve_locals_t5, ComposeResult};
pub use controlled::{
    synth_controlled_n, synth_controlled_t4, synth_controlled_t6, synth_two_controlled,
    universal_budget,
};
pub use mirror::mirror_rewrite;
pub use region::{reachable_region, Constraint, Membership, Region, Sufficiency};
pub use supercontrolled::{build_uabc, synth_supercontrolled2, synth_supercontrolled3};

use crate::canonical::{kak, mirror_coords, CanonicalCoords};
use crate::error::{Error, Result};
use crate::matcore::{canonical_gate, Mat4, Tolerances};

/// Tolerance for recognizing the class of a custom base gate.
const CLASS_TOL: f64 = 1e-9;

/// A circuit over `base` that evaluates to `target`.
///
/// Super-controlled bases always use three applications; controlled bases
/// use [`universal_budget`] applications. A mirrored controlled base is
/// handled by building the circuit for the plain controlled gate and
/// mirroring every application. Custom bases are accepted when their class
/// is controlled, super-controlled or mirrored-controlled.
pub fn synth_universal(target: &Mat4, base: &BaseGate) -> Result<Circuit> {
    target.ensure_unitary(Tolerances::default().unitarity)?;
    base.validate()?;
    match *base {
        BaseGate::SuperControlled { alpha2 } => {
            let c = kak(target)?.coords;
            synth_supercontrolled3(c.c1, c.c2, c.c3, alpha2)?.aligned_to(target)
        }
        BaseGate::Controlled { gamma } => {
            let n = universal_budget(gamma)?;
            let [h1, h2, h3] = kak(target)?.coords.doubled();
            let circuit = if n == 3 {
                synth_controlled_t6(h1, h2, h3, gamma)?
            } else {
                synth_controlled_t4(h1, h2, h3, gamma, n)?
            };
            circuit.aligned_to(target)
        }
        BaseGate::MirroredControlled { gamma } => {
            let n = universal_budget(gamma)?;
            // Each mirrored application contributes one factor of W on the
            // output side, so build W^{−n} · target first.
            let w_inv = canonical_gate(FRAC_PI_4, FRAC_PI_4, FRAC_PI_4).adjoint();
            let inner = (0..n).fold(*target, |acc, _| w_inv * acc);
            let mut circuit = synth_universal(&inner, &BaseGate::Controlled { gamma })?;
            for i in 0..n {
                circuit = mirror_rewrite(&circuit, i)?;
            }
            circuit.aligned_to(target)
        }
        BaseGate::Custom(_) => {
            let stand_in = recognize(base)?;
            synth_universal(target, &stand_in)?
                .rebase(base.clone())?
                .aligned_to(target)
        }
    }
}

/// A canonical-form gate locally equivalent to a custom base.
fn recognize(base: &BaseGate) -> Result<BaseGate> {
    let c = base.coords()?;
    let near = |x: f64, y: f64| (x - y).abs() <= CLASS_TOL;
    if c.c1 > CLASS_TOL && near(c.c2, 0.0) && near(c.c3, 0.0) {
        return Ok(BaseGate::Controlled { gamma: 2.0 * c.c1 });
    }
    if near(c.c1, FRAC_PI_4) && near(c.c3, 0.0) {
        return Ok(BaseGate::SuperControlled { alpha2: c.c2.max(0.0) });
    }
    let m: CanonicalCoords = mirror_coords(c);
    if m.c1 > CLASS_TOL && near(m.c2, 0.0) && near(m.c3, 0.0) {
        return Ok(BaseGate::MirroredControlled { gamma: 2.0 * m.c1 });
    }
    Err(Error::UnsupportedBase(format!(
        "custom gate with coordinates ({:.6}, {:.6}, {:.6}) is neither controlled, super-controlled nor a mirrored controlled gate",
        c.c1, c.c2, c.c3
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::coords_of;
    use crate::matcore::{distance_up_to_phase, haar_random_u4};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, FRAC_PI_8};

    fn check(target: &Mat4, base: &BaseGate, n: usize) {
        let c = synth_universal(target, base).unwrap();
        assert_eq!(c.n(), n);
        let m = c.evaluate().unwrap();
        assert!(distance_up_to_phase(&m, target) < 1e-8);
        assert!(m.max_abs_diff(target) < 1e-7);
    }

    #[test]
    fn cnot_target_with_cnot_class_base() {
        check(&Mat4::cnot(), &BaseGate::Controlled { gamma: FRAC_PI_2 }, 3);
    }

    #[test]
    fn haar_targets_with_supercontrolled_base() {
        for seed in 0..20 {
            check(&haar_random_u4(seed), &BaseGate::SuperControlled { alpha2: FRAC_PI_8 }, 3);
        }
    }

    #[test]
    fn haar_targets_with_weaker_controlled_bases() {
        for (seed, gamma, n) in [(1, FRAC_PI_3, 5), (2, FRAC_PI_4, 6), (3, FRAC_PI_6, 9), (4, 1.2, 4)] {
            check(&haar_random_u4(seed), &BaseGate::Controlled { gamma }, n);
        }
    }

    #[test]
    fn base_gate_as_its_own_target() {
        let base = BaseGate::Controlled { gamma: 0.9 };
        check(&base.matrix(), &base, 6);
    }

    #[test]
    fn mirrored_base_is_universal() {
        let base = BaseGate::MirroredControlled { gamma: FRAC_PI_2 };
        for seed in 10..15 {
            let c = synth_universal(&haar_random_u4(seed), &base).unwrap();
            assert!(c.gates().iter().all(|g| *g == base));
            assert!(distance_up_to_phase(&c.evaluate().unwrap(), &haar_random_u4(seed)) < 1e-8);
        }
    }

    #[test]
    fn custom_bases_by_class() {
        let target = haar_random_u4(77);
        let dcnot = Mat4::cnot().swap_qubits() * Mat4::cnot();
        for (m, n) in [(Mat4::cnot(), 3), (dcnot, 3), (canonical_gate(FRAC_PI_4, 0.2, 0.0), 3)] {
            let base = BaseGate::Custom(m);
            let c = synth_universal(&target, &base).unwrap();
            assert_eq!(c.n(), n);
            assert!(c.gates().iter().all(|g| *g == base));
            assert!(distance_up_to_phase(&c.evaluate().unwrap(), &target) < 1e-8);
        }
    }

    #[test]
    fn unrecognized_custom_base() {
        let e = synth_universal(&Mat4::cnot(), &BaseGate::Custom(haar_random_u4(3))).unwrap_err();
        assert!(matches!(e, Error::UnsupportedBase(_)));
    }

    #[test]
    fn non_unitary_target() {
        let bad = Mat4::identity().scale(2.0.into());
        let e = synth_universal(&bad, &BaseGate::Controlled { gamma: FRAC_PI_2 }).unwrap_err();
        assert!(matches!(e, Error::NonUnitaryInput { .. }));
    }

    #[test]
    fn class_of_universal_output_matches_target() {
        let t = haar_random_u4(5);
        let c = synth_universal(&t, &BaseGate::Controlled { gamma: 0.7 }).unwrap();
        let a = coords_of(&c.evaluate().unwrap()).unwrap();
        assert!(a.distance(coords_of(&t).unwrap()) < 1e-8);
    }
}
