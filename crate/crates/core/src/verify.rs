//! Seeded brute-force checks of synthesized circuits and reachability.
//!
//! Every trial draws its randomness from its own generator, seeded with
//! [`trial_seed`]`(master, index)`. Trials run in parallel and are
//! collected in index order, so a report depends only on the master seed.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canonical::{coords_of, kak};
use crate::error::{Error, Result};
use crate::matcore::{distance_up_to_phase, haar_local_from, haar_u4_from, Mat4, Tolerances};
use crate::synth::{
    reachable_region, synth_controlled_n, synth_controlled_t4, synth_controlled_t6,
    synth_supercontrolled3, BaseGate, Circuit,
};

/// End-to-end tolerance: two decompositions compound rounding.
pub const END_TO_END_TOL: f64 = 1e-8;
/// Tolerance for a single decomposition.
pub const SINGLE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyMode {
    /// `distance_up_to_phase` between matrices.
    ExactPhase,
    /// Distance between normalized canonical coordinates.
    LocalEquiv,
    /// Violation of a reachable-region predicate, in coordinate units.
    Region,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub seed: u64,
    pub input: String,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub mode: VerifyMode,
    pub tolerance: f64,
    pub trials: usize,
    pub max_residual: f64,
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    pub fn new(mode: VerifyMode, tolerance: f64) -> Self {
        Self {
            mode,
            tolerance,
            trials: 0,
            max_residual: 0.0,
            failures: Vec::new(),
        }
    }

    pub fn record(&mut self, seed: u64, input: impl Into<String>, residual: f64) {
        self.trials += 1;
        // NaN counts as a failure.
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        self.max_residual = self.max_residual.max(residual);
        if residual > self.tolerance {
            self.failures.push(Failure {
                seed,
                input: input.into(),
                residual,
            });
        }
    }

    /// Combines two reports; mode and tolerance are taken from `self`.
    pub fn merge(mut self, other: VerifyReport) -> VerifyReport {
        self.trials += other.trials;
        self.max_residual = self.max_residual.max(other.max_residual);
        self.failures.extend(other.failures);
        self
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "{} trials, max residual {:.3e} (tol {:.1e}), {} failures",
            self.trials,
            self.max_residual,
            self.tolerance,
            self.failures.len()
        )
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index` under `master`: `splitmix64(master + splitmix64(index))`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(splitmix64(index)))
}

/// Runs `trial` for every index in parallel and records the results in
/// index order.
fn run_trials<F>(mode: VerifyMode, tol: f64, trials: usize, seed: u64, trial: F) -> VerifyReport
where
    F: Fn(u64) -> (String, f64) + Sync,
{
    let rows: Vec<(u64, String, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let s = trial_seed(seed, i);
            let (input, residual) = trial(s);
            (s, input, residual)
        })
        .collect();
    let mut report = VerifyReport::new(mode, tol);
    for (s, input, residual) in rows {
        report.record(s, input, residual);
    }
    report
}

/// Residual of `c` against `target` under `mode`.
pub fn check_circuit(c: &Circuit, target: &Mat4, mode: VerifyMode, tol: f64) -> Result<VerifyReport> {
    target.ensure_unitary(Tolerances::default().unitarity)?;
    let got = c.evaluate()?;
    let residual = match mode {
        VerifyMode::ExactPhase => distance_up_to_phase(&got, target),
        VerifyMode::LocalEquiv => coords_of(&got)?.distance(coords_of(target)?),
        VerifyMode::Region => {
            return Err(Error::DomainError(
                "region mode applies to scans, not single circuits".into(),
            ))
        }
    };
    let mut report = VerifyReport::new(mode, tol);
    report.record(0, format!("{} applications of {}", c.n(), c.base.label()), residual);
    Ok(report)
}

/// `n` applications of `base` between Haar-random local layers.
pub fn random_circuit(base: &BaseGate, n: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let layers = (0..=n).map(|_| haar_local_from(&mut rng)).collect();
    Circuit::with_layers(base.clone(), layers)
}

/// Samples random circuits of `n` applications and measures how far their
/// normalized coordinates fall outside the necessary region, in
/// coordinate (not doubled) units.
pub fn necessity_scan(base: &BaseGate, n: usize, trials: usize, seed: u64) -> Result<VerifyReport> {
    let region = reachable_region(base, n)?;
    Ok(run_trials(VerifyMode::Region, SINGLE_TOL, trials, seed, |s| {
        let c = random_circuit(base, n, s);
        let residual = c
            .evaluate()
            .and_then(|m| coords_of(&m))
            .map(|k| region.violation(k.doubled()) / 2.0)
            .unwrap_or(f64::INFINITY);
        (format!("{} n={n}", base.label()), residual)
    }))
}

/// Builds the doubled target `h` with every construction whose
/// preconditions hold and checks each against a randomly dressed copy of
/// the target. At least two controlled-gate constructions must apply.
pub fn cross_method_check(h: [f64; 3], gamma: f64, seed: u64) -> Result<VerifyReport> {
    BaseGate::Controlled { gamma }.validate()?;
    let canonical = crate::canonical::CanonicalCoords::from_doubled(h);
    let [h1, h2, h3] = crate::canonical::weyl_normalize(canonical.to_array()).coords.doubled();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let pre = haar_local_from(&mut rng);
    let post = haar_local_from(&mut rng);
    let target = post.to_mat4() * canonical.matrix() * pre.to_mat4();

    let slack = 1e-9;
    let mut methods: Vec<(String, Circuit)> = Vec::new();
    if h3.abs() <= slack {
        let n = (((h1 + h2) / gamma) - slack).ceil().max(2.0) as usize;
        methods.push((format!("pair n={n}"), synth_controlled_n(h1, h2, gamma, n)?));
    }
    if let Ok(c) = synth_controlled_t6(h1, h2, h3, gamma) {
        methods.push(("three-application".into(), c));
    }
    let n4 = (((h1 + h2 + h3.abs()) / gamma) - slack).ceil().max(4.0) as usize;
    methods.push((format!("factored n={n4}"), synth_controlled_t4(h1, h2, h3, gamma, n4)?));
    if methods.len() < 2 {
        return Err(Error::OutOfRegion {
            constraint: "target covered by only one controlled-gate construction".into(),
        });
    }
    if (gamma - FRAC_PI_2).abs() < 1e-12 {
        methods.push((
            "supercontrolled α2=0".into(),
            synth_supercontrolled3(h1 / 2.0, h2 / 2.0, h3 / 2.0, 0.0)?,
        ));
    }

    let want = coords_of(&target)?;
    let mut report = VerifyReport::new(VerifyMode::LocalEquiv, END_TO_END_TOL);
    for (name, c) in methods {
        let got = coords_of(&c.evaluate()?)?;
        report.record(seed, format!("{name} h=({h1:.6},{h2:.6},{h3:.6}) γ={gamma:.6}"), got.distance(want));
    }
    Ok(report)
}

/// KAK reconstruction error on Haar-random gates.
pub fn roundtrip_scan(trials: usize, seed: u64) -> VerifyReport {
    run_trials(VerifyMode::ExactPhase, SINGLE_TOL, trials, seed, |s| {
        let u = haar_u4_from(&mut ChaCha20Rng::seed_from_u64(s));
        let residual = kak(&u).map(|k| k.residual(&u)).unwrap_or(f64::INFINITY);
        ("haar u4".to_string(), residual)
    })
}

/// Gate angles used by the suites.
pub const SUITE_GAMMAS: [f64; 4] = [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3, FRAC_PI_2];

/// [`necessity_scan`] for every `γ` in [`SUITE_GAMMAS`] and `n ∈ {2, 3, 4}`,
/// `trials` samples each.
pub fn necessity_suite(trials: usize, seed: u64) -> Result<VerifyReport> {
    let mut report = VerifyReport::new(VerifyMode::Region, SINGLE_TOL);
    for (k, &gamma) in SUITE_GAMMAS.iter().enumerate() {
        for n in 2..=4 {
            let sub = necessity_scan(&BaseGate::Controlled { gamma }, n, trials, trial_seed(seed, (k * 8 + n) as u64))?;
            report = report.merge(sub);
        }
    }
    Ok(report)
}

/// [`cross_method_check`] on random targets that at least two controlled
/// constructions cover, with `γ` drawn from [`SUITE_GAMMAS`].
pub fn crossmethod_suite(trials: usize, seed: u64) -> Result<VerifyReport> {
    let results: Vec<Result<VerifyReport>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let s = trial_seed(seed, i);
            let mut rng = ChaCha20Rng::seed_from_u64(s);
            let gamma = SUITE_GAMMAS[rng.random_range(0..SUITE_GAMMAS.len())];
            // Half the targets sit on the h3 = 0 plane, where the pair
            // construction applies; the rest must fall inside the
            // three-application region.
            loop {
                let h1 = rng.random_range(0.0..FRAC_PI_2);
                let h2 = rng.random_range(0.0..=h1);
                let h3 = if i % 2 == 0 { 0.0 } else { rng.random_range(-h2..=h2) };
                match cross_method_check([h1, h2, h3], gamma, s) {
                    Err(Error::OutOfRegion { .. }) => continue,
                    other => return other,
                }
            }
        })
        .collect();
    let mut report = VerifyReport::new(VerifyMode::LocalEquiv, END_TO_END_TOL);
    for r in results {
        report = report.merge(r?);
    }
    Ok(report)
}
