use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use weyl_core::canonical::{coords_of, kak, local_invariant, mirror_coords, mirror_of};
use weyl_core::synth::{
    reachable_region, synth_controlled_n, synth_controlled_t4, synth_controlled_t6,
    synth_supercontrolled2, synth_universal, universal_budget,
};
use weyl_core::verify::{self, check_circuit};
use weyl_core::{
    canonical_gate, distance_up_to_phase, BaseGate, CanonicalCoords, Circuit, Error, Mat2, Mat4,
    VerifyMode,
};

use crate::angle::{format_angle, format_real, parse_gate_angle, parse_triple};
use crate::doc::{CircuitDocument, LayerDocument, MatrixDocument};
use crate::{
    Cli, CliError, Command, ModeArg, Suite, DEFAULT_TOL, EXIT_OK, EXIT_REGION,
    EXIT_RESIDUAL, UNITARITY_TOL,
};

type CmdResult = Result<i32, CliError>;

/// Executes a parsed command line and returns the exit code. Documents go
/// to `out`, diagnostics to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let ctx = Context {
        unitarity: (!cli.allow_nonunitary).then_some(UNITARITY_TOL),
    };
    let result = match &cli.command {
        Command::Canon { file, json } => ctx.canon(file, *json, out),
        Command::Synth {
            target,
            coords,
            base,
            n,
            out: path,
        } => ctx.synth(target.as_deref(), coords.as_deref(), base, *n, path.as_deref(), out, err),
        Command::Mirror {
            circuit,
            index,
            gate,
        } => match (circuit, gate) {
            (Some(c), _) => ctx.mirror_circuit(c, index.unwrap_or(0), out, err),
            (None, Some(g)) => ctx.mirror_gate(g, out),
            (None, None) => Err(CliError::parse("give --circuit with --index, or --gate")),
        },
        Command::Verify {
            circuit,
            target,
            mode,
            tol,
            json,
        } => ctx.verify(circuit, target, *mode, *tol, *json, out),
        Command::Reach { base, n, point } => ctx.reach(base, *n, point.as_deref(), out),
        Command::Sweep {
            suite,
            trials,
            seed,
            out: path,
        } => ctx.sweep(*suite, *trials, *seed, path.as_deref(), out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code
        }
    }
}

/// Residual tolerance: `WEYL_TOL` when set, else [`DEFAULT_TOL`].
fn env_tolerance() -> Result<f64, CliError> {
    match std::env::var("WEYL_TOL") {
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| t.is_finite() && *t >= 0.0)
            .ok_or_else(|| CliError::parse(format!("WEYL_TOL={v:?} is not a non-negative number"))),
        Err(_) => Ok(DEFAULT_TOL),
    }
}

/// Parses `controlled:γ`, `supercontrolled:α2`, `mirrored:γ` or `cnot`.
/// Decimal angles close to a multiple of π/16 are read as that multiple.
pub fn parse_base(text: &str) -> Result<BaseGate, CliError> {
    let lower = text.trim().to_lowercase();
    if lower == "cnot" {
        return Ok(BaseGate::Controlled {
            gamma: std::f64::consts::FRAC_PI_2,
        });
    }
    let (kind, value) = lower
        .split_once(':')
        .ok_or_else(|| CliError::parse(format!("base {text:?} should look like controlled:γ")))?;
    let v = parse_gate_angle(value).map_err(CliError::parse)?;
    let base = match kind {
        "controlled" => BaseGate::Controlled { gamma: v },
        "supercontrolled" => BaseGate::SuperControlled { alpha2: v },
        "mirrored" => BaseGate::MirroredControlled { gamma: v },
        other => return Err(CliError::parse(format!("unknown base kind {other:?}"))),
    };
    base.validate().map_err(|e| CliError::parse(e.to_string()))?;
    Ok(base)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("documents serialize")
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n"))
            .map_err(|e| CliError::parse(format!("{}: {e}", p.display()))),
        None => writeln!(out, "{text}").map_err(|e| CliError::parse(e.to_string())),
    }
}

fn io(e: std::io::Error) -> CliError {
    CliError::parse(e.to_string())
}

fn format_coords(c: CanonicalCoords) -> String {
    let [a, b, d] = c.to_array().map(format_angle);
    format!("({a}, {b}, {d})")
}

fn format_coords_decimal(c: CanonicalCoords) -> String {
    let [a, b, d] = c.to_array().map(format_real);
    let [qa, qb, qd] = c.in_quarter_pi().map(|x| {
        if (x - x.round()).abs() < 1e-9 {
            format!("{}", x.round() as i64)
        } else {
            format!("{x:.9}")
        }
    });
    format!("({a}, {b}, {d})·({qa}, {qb}, {qd})·π/4")
}

fn format_mat2(m: &Mat2) -> String {
    let z = |c: num_complex::Complex64| {
        let sign = if c.im < 0.0 && c.im.abs() >= 1e-12 { '-' } else { '+' };
        format!("{}{sign}{}i", format_real(c.re), format_real(c.im.abs()))
    };
    format!(
        "[[{}, {}], [{}, {}]]",
        z(m.0[0][0]),
        z(m.0[0][1]),
        z(m.0[1][0]),
        z(m.0[1][1])
    )
}

#[derive(Serialize)]
struct CanonJson {
    coords: CanonicalCoords,
    coords_quarter_pi: [f64; 3],
    phase: f64,
    pre: LayerDocument,
    post: LayerDocument,
    invariant: [f64; 4],
    residual: f64,
}

struct Context {
    unitarity: Option<f64>,
}

impl Context {
    fn read_matrix(&self, path: &Path) -> Result<Mat4, CliError> {
        read_json::<MatrixDocument>(path)?.to_mat4(self.unitarity)
    }

    fn read_circuit(&self, path: &Path) -> Result<Circuit, CliError> {
        read_json::<CircuitDocument>(path)?.to_circuit(self.unitarity)
    }

    fn canon(&self, file: &Path, json: bool, out: &mut dyn Write) -> CmdResult {
        let u = self.read_matrix(file)?;
        let k = kak(&u)?;
        let inv = local_invariant(&u)?;
        let residual = k.residual(&u);
        if json {
            let doc = CanonJson {
                coords: k.coords,
                coords_quarter_pi: k.coords.in_quarter_pi(),
                phase: k.phase,
                pre: LayerDocument {
                    a: MatrixDocument::from_mat2(&k.pre.a),
                    b: MatrixDocument::from_mat2(&k.pre.b),
                },
                post: LayerDocument {
                    a: MatrixDocument::from_mat2(&k.post.a),
                    b: MatrixDocument::from_mat2(&k.post.b),
                },
                invariant: inv.phases,
                residual,
            };
            writeln!(out, "{}", to_json(&doc)).map_err(io)?;
            return Ok(EXIT_OK);
        }
        let lines = [
            format!("coords: {}", format_coords_decimal(k.coords)),
            format!("class: {}", format_coords(k.coords)),
            format!("phase: {}", format_real(k.phase)),
            format!("pre.a: {}", format_mat2(&k.pre.a)),
            format!("pre.b: {}", format_mat2(&k.pre.b)),
            format!("post.a: {}", format_mat2(&k.post.a)),
            format!("post.b: {}", format_mat2(&k.post.b)),
            format!(
                "invariant: [{}]",
                inv.phases.map(format_real).join(", ")
            ),
            format!("residual: {residual:.3e}"),
        ];
        writeln!(out, "{}", lines.join("\n")).map_err(io)?;
        Ok(EXIT_OK)
    }

    #[allow(clippy::too_many_arguments)]
    fn synth(
        &self,
        target: Option<&Path>,
        coords: Option<&str>,
        base: &str,
        n: Option<usize>,
        path: Option<&Path>,
        out: &mut dyn Write,
        err: &mut dyn Write,
    ) -> CmdResult {
        let tol = env_tolerance()?;
        let base = parse_base(base)?;
        let target = match (target, coords) {
            (Some(p), _) => self.read_matrix(p)?,
            (None, Some(c)) => {
                let [c1, c2, c3] = parse_triple(c).map_err(CliError::parse)?;
                canonical_gate(c1, c2, c3)
            }
            (None, None) => return Err(CliError::parse("give --target or --coords")),
        };
        let (label, circuit) = match n {
            None => (universal_path(&base)?, synth_universal(&target, &base)?),
            Some(n) => synth_with_budget(&target, &base, n)?,
        };
        let circuit = circuit.aligned_to(&target)?;
        let residual = distance_up_to_phase(&circuit.evaluate()?, &target);
        writeln!(err, "path: {label}").map_err(io)?;
        writeln!(err, "applications: {}", circuit.n()).map_err(io)?;
        writeln!(err, "residual: {residual:.3e}").map_err(io)?;
        emit(&to_json(&CircuitDocument::from_circuit(&circuit)), path, out)?;
        Ok(if residual <= tol { EXIT_OK } else { EXIT_RESIDUAL })
    }

    fn mirror_gate(&self, file: &Path, out: &mut dyn Write) -> CmdResult {
        let u = self.read_matrix(file)?;
        let c = coords_of(&u)?;
        let m = coords_of(&mirror_of(&u)?)?;
        debug_assert!(m.distance(mirror_coords(c)) < 1e-8);
        writeln!(out, "coords: {}", format_coords(c)).map_err(io)?;
        writeln!(out, "mirror: {}", format_coords(m)).map_err(io)?;
        Ok(EXIT_OK)
    }

    fn mirror_circuit(&self, file: &Path, index: usize, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
        let c = self.read_circuit(file)?;
        let rewritten = weyl_core::synth::mirror_rewrite(&c, index)?;
        let before = coords_of(&c.evaluate()?)?;
        let after = coords_of(&rewritten.evaluate()?)?;
        writeln!(err, "before: {}", format_coords(before)).map_err(io)?;
        writeln!(err, "after: {}", format_coords(after)).map_err(io)?;
        emit(&to_json(&CircuitDocument::from_circuit(&rewritten)), None, out)?;
        Ok(EXIT_OK)
    }

    #[allow(clippy::too_many_arguments)]
    fn verify(&self, circuit: &Path, target: &Path, mode: ModeArg, tol: Option<f64>, json: bool, out: &mut dyn Write) -> CmdResult {
        let tol = match tol {
            Some(t) => t,
            None => env_tolerance()?,
        };
        let c = self.read_circuit(circuit)?;
        let t = self.read_matrix(target)?;
        let mode = match mode {
            ModeArg::Exact => VerifyMode::ExactPhase,
            ModeArg::Local => VerifyMode::LocalEquiv,
        };
        let report = check_circuit(&c, &t, mode, tol)?;
        if json {
            writeln!(out, "{}", to_json(&report)).map_err(io)?;
        } else {
            writeln!(out, "residual: {:.3e}", report.max_residual).map_err(io)?;
            writeln!(out, "tolerance: {tol:.1e}").map_err(io)?;
            writeln!(out, "{}", if report.passed() { "PASS" } else { "FAIL" }).map_err(io)?;
        }
        Ok(if report.passed() { EXIT_OK } else { EXIT_RESIDUAL })
    }

    fn reach(&self, base: &str, n: usize, point: Option<&str>, out: &mut dyn Write) -> CmdResult {
        let base = parse_base(base)?;
        let region = reachable_region(&base, n)?;
        let budget = format_angle(n as f64 * region.gamma);
        writeln!(
            out,
            "region: n={n}, γ={}, sufficiency={}",
            format_angle(region.gamma),
            serde_json::to_value(region.sufficiency).map(|v| v.as_str().unwrap_or("").to_string()).unwrap_or_default()
        )
        .map_err(io)?;
        let mut labels: Vec<&str> = region.constraints.iter().map(|c| c.label.as_str()).collect();
        labels.dedup();
        for label in labels {
            writeln!(out, "  {}", label.replace("nγ", &format!("nγ = {budget}"))).map_err(io)?;
        }
        let predicate: Vec<String> = if n == 2 {
            vec!["h3 = 0".into(), format!("h1+h2 ≤ {budget}")]
        } else {
            vec![format!("h1+h2+|h3| ≤ {budget}")]
        };
        writeln!(out, "predicate: {}", predicate.join("; ")).map_err(io)?;
        if let Some(p) = point {
            let h = parse_triple(p).map_err(CliError::parse)?;
            let m = region.membership(h);
            writeln!(out, "{}", if m.inside { "INSIDE" } else { "OUTSIDE" }).map_err(io)?;
            writeln!(out, "binding: {} (slack {:.3e})", m.binding, m.slack + 0.0).map_err(io)?;
            writeln!(out, "constructive: {}", if m.constructive { "yes" } else { "no" }).map_err(io)?;
        }
        Ok(EXIT_OK)
    }

    fn sweep(&self, suite: Suite, trials: usize, seed: u64, path: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
        let report = match suite {
            Suite::Necessity => verify::necessity_suite(trials, seed)?,
            Suite::Roundtrip => verify::roundtrip_scan(trials, seed),
            Suite::Crossmethod => verify::crossmethod_suite(trials, seed)?,
        };
        writeln!(err, "{suite:?}: {}", report.summary()).map_err(io)?;
        emit(&to_json(&report), path, out)?;
        Ok(if report.passed() { EXIT_OK } else { EXIT_RESIDUAL })
    }
}

fn universal_path(base: &BaseGate) -> Result<String, CliError> {
    Ok(match base {
        BaseGate::SuperControlled { .. } => "super-controlled, three applications".into(),
        BaseGate::Controlled { gamma } => match universal_budget(*gamma)? {
            3 => "controlled, three-application construction".into(),
            n => format!("controlled, factored construction with {n} applications"),
        },
        BaseGate::MirroredControlled { gamma } => format!(
            "mirrored controlled, {} applications",
            universal_budget(*gamma)?
        ),
        BaseGate::Custom(_) => "custom base".into(),
    })
}

fn out_of_region(constraint: &str) -> CliError {
    CliError::from(Error::OutOfRegion {
        constraint: constraint.to_string(),
    })
}

/// Synthesis with an explicit application count.
fn synth_with_budget(target: &Mat4, base: &BaseGate, n: usize) -> Result<(String, Circuit), CliError> {
    let slack = 1e-9;
    let coords = kak(target)?.coords;
    match *base {
        BaseGate::SuperControlled { alpha2 } => match n {
            3 => Ok((universal_path(base)?, synth_universal(target, base)?)),
            2 if coords.c3.abs() <= slack => Ok((
                "super-controlled, two applications".into(),
                synth_supercontrolled2(coords.c1, coords.c2, alpha2)?,
            )),
            2 => Err(out_of_region("h3 = 0")),
            _ => Err(CliError::new(EXIT_REGION, "super-controlled bases take --n 2 or --n 3")),
        },
        BaseGate::Controlled { gamma } => {
            let [h1, h2, h3] = coords.doubled();
            let budget = n as f64 * gamma + slack;
            match n {
                0 | 1 => Err(out_of_region("n ≥ 2")),
                2 => {
                    if h1 + h2 > budget {
                        return Err(out_of_region("h1+h2 ≤ nγ"));
                    }
                    if h3.abs() > slack {
                        return Err(out_of_region("h3 = 0"));
                    }
                    Ok(("controlled pair, two applications".into(), synth_controlled_n(h1, h2, gamma, 2)?))
                }
                _ => {
                    if h1 + h2 + h3.abs() > budget {
                        return Err(out_of_region("h1+h2+|h3| ≤ nγ"));
                    }
                    if h3.abs() <= slack {
                        return Ok((format!("controlled pair recursion, {n} applications"), synth_controlled_n(h1, h2, gamma, n)?));
                    }
                    if n == 3 {
                        return match synth_controlled_t6(h1, h2, h3, gamma) {
                            Ok(c) => Ok(("controlled, three-application construction".into(), c)),
                            Err(Error::OutOfRegion { constraint }) => Err(out_of_region(&constraint)),
                            Err(e) => Err(e.into()),
                        };
                    }
                    Ok((format!("controlled, factored construction with {n} applications"), synth_controlled_t4(h1, h2, h3, gamma, n)?))
                }
            }
        }
        _ => Err(CliError::new(EXIT_REGION, "--n is supported for controlled and super-controlled bases")),
    }
}
