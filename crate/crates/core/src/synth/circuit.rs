use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::canonical::{align_locally, coords_of, CanonicalCoords};
use crate::error::{Error, Result};
use crate::matcore::{
    canonical_gate, controlled_gate, relative_phase, LocalLayer, Mat4, Tolerances,
};

/// Coordinate gap accepted when absorbing outer local layers. Boundary
/// targets can lose up to `√ε` in the coordinates through `arccos`, while
/// the matrix distance stays at rounding level.
pub(crate) const ALIGN_TOL: f64 = 1e-6;

/// The entangling gate a circuit applies between its local layers.
#[derive(Clone, Debug, PartialEq)]
pub enum BaseGate {
    /// `exp((i/2) γ σ3⊗σ3)`, class `U_d(γ/2, 0, 0)`, with `0 < γ ≤ π/2`.
    Controlled { gamma: f64 },
    /// `U_d(π/4, α2, 0)` with `0 ≤ α2 ≤ π/4`.
    SuperControlled { alpha2: f64 },
    /// `U_d(π/4, π/4, π/4 + γ/2)`, the mirror of `Controlled { gamma }`.
    MirroredControlled { gamma: f64 },
    Custom(Mat4),
}

impl BaseGate {
    pub fn matrix(&self) -> Mat4 {
        match self {
            BaseGate::Controlled { gamma } => controlled_gate(*gamma),
            BaseGate::SuperControlled { alpha2 } => canonical_gate(FRAC_PI_4, *alpha2, 0.0),
            BaseGate::MirroredControlled { gamma } => {
                canonical_gate(FRAC_PI_4, FRAC_PI_4, FRAC_PI_4 + gamma / 2.0)
            }
            BaseGate::Custom(m) => *m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            BaseGate::Controlled { gamma } | BaseGate::MirroredControlled { gamma } => {
                if gamma > 0.0 && gamma <= FRAC_PI_2 + 1e-12 {
                    Ok(())
                } else {
                    Err(Error::DomainError(format!("γ = {gamma} outside (0, π/2]")))
                }
            }
            BaseGate::SuperControlled { alpha2 } => {
                if (-1e-12..=FRAC_PI_4 + 1e-12).contains(&alpha2) {
                    Ok(())
                } else {
                    Err(Error::DomainError(format!("α2 = {alpha2} outside [0, π/4]")))
                }
            }
            BaseGate::Custom(m) => m.ensure_unitary(Tolerances::default().unitarity),
        }
    }

    /// Normalized canonical coordinates of the gate's class.
    pub fn coords(&self) -> Result<CanonicalCoords> {
        coords_of(&self.matrix())
    }

    /// The gate after `U_d(π/4, π/4, π/4)` is applied on its output side.
    pub fn mirrored(&self) -> BaseGate {
        match *self {
            BaseGate::Controlled { gamma } => BaseGate::MirroredControlled { gamma },
            _ => BaseGate::Custom(canonical_gate(FRAC_PI_4, FRAC_PI_4, FRAC_PI_4) * self.matrix()),
        }
    }

    /// Conjugation by SWAP. Canonical-form gates are symmetric under it.
    pub fn swap_conjugated(&self) -> BaseGate {
        match self {
            BaseGate::Custom(m) => BaseGate::Custom(m.swap_qubits()),
            other => other.clone(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            BaseGate::Controlled { gamma } => format!("controlled(γ={gamma})"),
            BaseGate::SuperControlled { alpha2 } => format!("supercontrolled(α2={alpha2})"),
            BaseGate::MirroredControlled { gamma } => format!("mirrored-controlled(γ={gamma})"),
            BaseGate::Custom(_) => "custom".to_string(),
        }
    }
}

/// `e^{i·phase} · L_n · G_{n−1} · … · G_0 · L_0`, with `L_0` applied first.
///
/// Every application uses `base` unless `overrides` (empty, or one entry
/// per application) names a different gate for that slot.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub phase: f64,
    pub layers: Vec<LocalLayer>,
    pub base: BaseGate,
    pub overrides: Vec<Option<BaseGate>>,
}

impl Circuit {
    /// A circuit of `n` applications of `base` with identity layers.
    pub fn bare(base: BaseGate, n: usize) -> Self {
        Self {
            phase: 0.0,
            layers: vec![LocalLayer::identity(); n + 1],
            base,
            overrides: Vec::new(),
        }
    }

    pub fn with_layers(base: BaseGate, layers: Vec<LocalLayer>) -> Self {
        Self {
            phase: 0.0,
            layers,
            base,
            overrides: Vec::new(),
        }
    }

    /// Number of base-gate applications.
    pub fn n(&self) -> usize {
        self.layers.len().saturating_sub(1)
    }

    pub fn gate_at(&self, index: usize) -> &BaseGate {
        self.overrides
            .get(index)
            .and_then(Option::as_ref)
            .unwrap_or(&self.base)
    }

    pub fn gates(&self) -> Vec<BaseGate> {
        (0..self.n()).map(|i| self.gate_at(i).clone()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::MalformedCircuit("no local layers".into()));
        }
        if !self.overrides.is_empty() && self.overrides.len() != self.n() {
            return Err(Error::MalformedCircuit(format!(
                "{} overrides for {} applications",
                self.overrides.len(),
                self.n()
            )));
        }
        if !self.phase.is_finite() {
            return Err(Error::MalformedCircuit("non-finite phase".into()));
        }
        let tol = Tolerances::default().unitarity;
        if let Some(k) = self.layers.iter().position(|l| !l.is_unitary(tol)) {
            return Err(Error::MalformedCircuit(format!("layer {k} is not unitary")));
        }
        for i in 0..self.n() {
            self.gate_at(i)
                .validate()
                .map_err(|e| Error::MalformedCircuit(format!("gate {i}: {e}")))?;
        }
        Ok(())
    }

    /// The matrix the circuit implements.
    pub fn evaluate(&self) -> Result<Mat4> {
        self.validate()?;
        let mut acc = self.layers[0].to_mat4();
        for (i, layer) in self.layers.iter().enumerate().skip(1) {
            acc = layer.to_mat4() * self.gate_at(i - 1).matrix() * acc;
        }
        Ok(acc.with_phase(self.phase))
    }

    /// Rebuilds the circuit from an explicit per-slot gate list, collapsing
    /// to a uniform base when every slot agrees.
    pub(crate) fn from_slots(phase: f64, layers: Vec<LocalLayer>, gates: Vec<BaseGate>, fallback: BaseGate) -> Self {
        let base = gates.first().cloned().unwrap_or(fallback);
        let overrides = if gates.iter().all(|g| *g == base) {
            Vec::new()
        } else {
            gates.into_iter().map(Some).collect()
        };
        Self {
            phase,
            layers,
            base,
            overrides,
        }
    }

    /// Runs `self` first, then `next`.
    pub fn then(self, next: Circuit) -> Circuit {
        let mut gates = self.gates();
        gates.extend(next.gates());
        let mut layers = self.layers;
        let last = layers.pop().unwrap_or_else(LocalLayer::identity);
        let mut rest = next.layers.into_iter();
        let first = rest.next().unwrap_or_else(LocalLayer::identity);
        layers.push(first * last);
        layers.extend(rest);
        Circuit::from_slots(self.phase + next.phase, layers, gates, self.base)
    }

    /// Replaces application `index` with `sub`, which must implement that
    /// gate's matrix exactly.
    pub fn splice(self, index: usize, sub: Circuit) -> Result<Circuit> {
        let n = self.n();
        if index >= n {
            return Err(Error::IndexOutOfRange { index, n });
        }
        let gates = self.gates();
        let prefix = Circuit::from_slots(
            0.0,
            self.layers[..=index].to_vec(),
            gates[..index].to_vec(),
            self.base.clone(),
        );
        let suffix = Circuit::from_slots(
            0.0,
            self.layers[index + 1..].to_vec(),
            gates[index + 1..].to_vec(),
            self.base.clone(),
        );
        let mut out = prefix.then(sub).then(suffix);
        out.phase += self.phase;
        Ok(out)
    }

    /// `e^{iφ} · post · self · pre`.
    pub fn dress(mut self, phase: f64, post: LocalLayer, pre: LocalLayer) -> Circuit {
        let last = self.layers.len() - 1;
        self.layers[last] = post * self.layers[last];
        self.layers[0] = self.layers[0] * pre;
        self.phase += phase;
        self
    }

    /// Absorbs outer local layers and a global phase so that the circuit
    /// evaluates to `target` exactly. The circuit must already be locally
    /// equivalent to `target`.
    pub fn aligned_to(self, target: &Mat4) -> Result<Circuit> {
        let product = self.evaluate()?;
        let (phase, post, pre) = align_locally(&product, target, ALIGN_TOL)?;
        let out = self.dress(phase, post, pre);
        let fix = relative_phase(&out.evaluate()?, target);
        let mut out = out;
        out.phase += fix;
        Ok(out)
    }

    /// Replaces every application by `new_base`, which must be locally
    /// equivalent to each current gate; the difference is absorbed into
    /// the neighbouring layers.
    pub fn rebase(&self, new_base: BaseGate) -> Result<Circuit> {
        let g = new_base.matrix();
        let mut layers = self.layers.clone();
        let mut phase = self.phase;
        for i in 0..self.n() {
            // old = e^{iφ} post · g · pre
            let (p, post, pre) = align_locally(&g, &self.gate_at(i).matrix(), ALIGN_TOL)?;
            layers[i] = pre * layers[i];
            layers[i + 1] = layers[i + 1] * post;
            phase += p;
        }
        Ok(Circuit {
            phase,
            layers,
            base: new_base,
            overrides: Vec::new(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{distance_up_to_phase, haar_random_u2, haar_random_u4, Mat2};

    fn random_layers(seed: u64, count: usize) -> Vec<LocalLayer> {
        (0..count as u64)
            .map(|k| LocalLayer::new(haar_random_u2(seed * 100 + 2 * k), haar_random_u2(seed * 100 + 2 * k + 1)))
            .collect()
    }

    /// Second evaluator: multiply the full 4×4 factors left to right from
    /// an explicit list.
    fn fold_left(c: &Circuit) -> Mat4 {
        let mut factors = vec![c.layers[0].to_mat4()];
        for i in 0..c.n() {
            factors.push(c.gate_at(i).matrix());
            factors.push(c.layers[i + 1].to_mat4());
        }
        factors
            .into_iter()
            .fold(Mat4::identity(), |acc, f| f * acc)
            .with_phase(c.phase)
    }

    #[test]
    fn evaluate_trivial_cases() {
        let c = Circuit::bare(BaseGate::Controlled { gamma: 0.4 }, 0);
        assert!(c.evaluate().unwrap().max_abs_diff(&Mat4::identity()) < 1e-15);
        let c = Circuit::bare(BaseGate::Controlled { gamma: 0.4 }, 1);
        assert!(c.evaluate().unwrap().max_abs_diff(&controlled_gate(0.4)) < 1e-15);
    }

    #[test]
    fn evaluate_matches_fold_left() {
        for seed in 0..20 {
            let mut c = Circuit::with_layers(
                BaseGate::SuperControlled { alpha2: 0.3 },
                random_layers(seed, 4),
            );
            c.phase = 0.37;
            c.overrides = vec![None, Some(BaseGate::Custom(haar_random_u4(seed))), None];
            assert!(c.evaluate().unwrap().max_abs_diff(&fold_left(&c)) < 1e-12);
        }
    }

    #[test]
    fn malformed_circuits_are_rejected() {
        let mut c = Circuit::bare(BaseGate::Controlled { gamma: 0.4 }, 2);
        c.overrides = vec![None];
        assert!(matches!(c.evaluate(), Err(Error::MalformedCircuit(_))));
        let mut c = Circuit::bare(BaseGate::Controlled { gamma: 0.4 }, 1);
        c.layers[1].a = Mat2::identity().scale(2.0.into());
        assert!(matches!(c.evaluate(), Err(Error::MalformedCircuit(_))));
        let c = Circuit::bare(BaseGate::Controlled { gamma: 2.0 }, 1);
        assert!(matches!(c.evaluate(), Err(Error::MalformedCircuit(_))));
        let c = Circuit { layers: vec![], ..Circuit::bare(BaseGate::Controlled { gamma: 0.4 }, 0) };
        assert!(matches!(c.evaluate(), Err(Error::MalformedCircuit(_))));
    }

    #[test]
    fn then_composes_matrices() {
        let a = Circuit::with_layers(BaseGate::Controlled { gamma: 0.4 }, random_layers(1, 3));
        let b = Circuit::with_layers(BaseGate::Controlled { gamma: 0.9 }, random_layers(2, 2));
        let want = b.evaluate().unwrap() * a.evaluate().unwrap();
        let joined = a.then(b);
        assert_eq!(joined.n(), 3);
        assert_eq!(joined.overrides.len(), 3);
        assert!(joined.evaluate().unwrap().max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn splice_preserves_evaluation() {
        let mut c = Circuit::with_layers(BaseGate::Controlled { gamma: 0.4 }, random_layers(3, 3));
        c.phase = 0.2;
        let want = c.evaluate().unwrap();
        // a one-application circuit equal to the gate itself
        let sub = Circuit::bare(BaseGate::Controlled { gamma: 0.4 }, 1);
        let s = c.clone().splice(1, sub).unwrap();
        assert!(s.evaluate().unwrap().max_abs_diff(&want) < 1e-12);
        assert!(matches!(c.splice(2, Circuit::bare(BaseGate::Controlled { gamma: 0.4 }, 1)), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn rebase_swaps_in_an_equivalent_gate() {
        let c = Circuit::with_layers(BaseGate::Controlled { gamma: FRAC_PI_2 }, random_layers(4, 4));
        let want = c.evaluate().unwrap();
        let r = c.rebase(BaseGate::Custom(Mat4::cnot())).unwrap();
        assert!(distance_up_to_phase(&r.evaluate().unwrap(), &want) < 1e-12);
        assert!(r.evaluate().unwrap().max_abs_diff(&want) < 1e-10);
    }
}
