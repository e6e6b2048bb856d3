use std::fs;
use std::path::{Path, PathBuf};

use fucik_core::io::{read_curve_csv, render_svg, write_curve_csv, write_profile_csv, CurveRow, Manifest};
use fucik_core::minimax::{
    dense_scan_oracle, minimal_level_above, mountain_pass_cp, newton_refine, parse_grid, trace_curve,
    verify_curve_properties, AuxDirection, CurveTrace, MinimaxOptions, ProbeConfig,
};
use fucik_core::nonlinear::{solve_two_solutions, Family, NonlinearOptions, Nonlinearity};
use fucik_core::operator::count_through_level;
use fucik_core::{
    fucik_residual, identity_suite, verify_spectrum, Backend, DiscreteOperator, Discretization, FucikError, FucikPoint,
};
use nalgebra::DMatrix;
use serde_json::{json, Value};

use crate::{
    AuxArg, BackendArg, CheckArg, CurveArgs, FamilyArg, GridArgs, NonlinearArgs, OracleArg, PlotArgs, SpectrumArgs,
    SuiteArg, VerifyArgs,
};

/// Allowed `|c(−p) − c(p) − p|` for `--check symmetry`.
const SYMMETRY_TOL: f64 = 1e-4;
const ORACLE_TOL: f64 = 1e-6;
const ORACLE_RESOLUTION: usize = 100_000;

#[derive(Debug)]
pub enum Failure {
    /// Bad flags or inputs; exit 1.
    Config(String),
    /// A solve broke down; exit 2.
    Solve(String),
}

impl From<FucikError> for Failure {
    fn from(e: FucikError) -> Self {
        match e {
            FucikError::InvalidArgument(_)
            | FucikError::Unsupported(_)
            | FucikError::Malformed(_)
            | FucikError::Io(_) => Failure::Config(e.to_string()),
            _ => Failure::Solve(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn config(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    config(format!("{}: {e}", path.display()))
}

fn out_path(dir: &Path, name: &str) -> Result<PathBuf, Failure> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    Ok(dir.join(name))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn write_manifest(dir: &Path, stem: &str, command: &str, files: Vec<String>, report: Value) -> Result<(), Failure> {
    let path = out_path(dir, &format!("{stem}.json"))?;
    let text = Manifest::new(command, files, report).to_json()?;
    write_text(&path, &text)
}

fn build_operator(g: &GridArgs) -> Result<DiscreteOperator, Failure> {
    if g.dimension == 0 {
        return Err(config("--n must be positive"));
    }
    if !(g.radius > 0.0) {
        return Err(config("--radius must be positive"));
    }
    let disc = match g.backend {
        BackendArg::Spectral => {
            let cutoff = g.cutoff.unwrap_or(if g.dimension == 1 { 32 } else { 8 });
            if cutoff == 0 {
                return Err(config("--cutoff must be positive"));
            }
            Discretization::new(g.dimension, Backend::Spectral, cutoff, g.radius)?
        }
        BackendArg::Fd => {
            if g.nodes < 5 {
                return Err(config("--nodes must be at least 5"));
            }
            Discretization::new(g.dimension, Backend::FiniteDifference, g.nodes, g.radius)?
        }
    };
    Ok(DiscreteOperator::assemble(&disc)?)
}

pub fn spectrum(a: &SpectrumArgs) -> Outcome {
    let tol = a.tol.unwrap_or(match a.grid.backend {
        BackendArg::Spectral => 1e-12,
        BackendArg::Fd => 2e-3,
    });
    if !(tol > 0.0) || a.kmax == 0 {
        return Err(config("--tol and --kmax must be positive"));
    }
    let op = build_operator(&a.grid)?;
    let count = count_through_level(a.grid.dimension, a.kmax);
    if count > op.reduced_dim() {
        return Err(config(format!(
            "--kmax {} needs {count} eigenvalues but the discretization has {}",
            a.kmax,
            op.reduced_dim()
        )));
    }
    let es = op.eigensystem(count)?;
    let report = verify_spectrum(&es, a.grid.dimension, tol);
    let complete = report.levels.len() == a.kmax;
    for l in &report.levels {
        println!(
            "level {:>3}  expected {:>8.4}  multiplicity {}/{}  max error {:.3e}",
            l.level, l.expected, l.multiplicity, l.expected_multiplicity, l.max_error
        );
    }
    let passed = report.passed && complete;
    println!(
        "spectrum N={} {:?}: max error {:.3e}, tol {tol:e} -> {}",
        a.grid.dimension,
        a.grid.backend,
        report.max_error,
        verdict(passed)
    );
    let body = json!({
        "dimension": a.grid.dimension,
        "backend": format!("{:?}", a.grid.backend).to_lowercase(),
        "kmax": a.kmax,
        "levels_checked": report.levels.len(),
        "spectrum": report,
        "residual": es.max_residual(&op)?,
        "passed": passed,
    });
    write_manifest(&a.grid.out_dir, "spectrum", "spectrum", vec!["spectrum.json".into()], body)?;
    Ok(passed)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn minimax_options(a: &CurveArgs) -> Result<MinimaxOptions, Failure> {
    if a.path_nodes < 5 || a.path_nodes.is_multiple_of(2) {
        return Err(config("--path-nodes must be odd and at least 5"));
    }
    Ok(MinimaxOptions {
        nodes: a.path_nodes,
        aux: match a.aux {
            AuxArg::SecondMode => AuxDirection::SecondMode,
            AuxArg::DecayingBump => AuxDirection::DecayingBump,
        },
        warm_start: !a.no_warm_start,
        ..MinimaxOptions::default()
    })
}

/// `c(−p)` by a direct solve for every `p > 0` of the trace, against
/// `c(p) + p`. Negative grid points already carry their direct solve.
fn symmetry_check(trace: &CurveTrace, op: &DiscreteOperator, opts: &MinimaxOptions) -> Result<(Value, bool), Failure> {
    let mut rows = Vec::new();
    let mut ok = true;
    for pt in trace.points.iter().filter(|pt| pt.p > 0.0) {
        let direct = match trace.symmetry.iter().find(|s| (s.p + pt.p).abs() < 1e-12) {
            Some(s) => s.direct,
            None => match mountain_pass_cp(-pt.p, op, opts).and_then(|c| newton_refine(&c, op)) {
                Ok(m) => m.c,
                Err(_) => f64::NAN,
            },
        };
        let defect = (direct - pt.c - pt.p).abs();
        let pass = defect <= SYMMETRY_TOL;
        ok &= pass;
        println!(
            "symmetry p={:<6} c(-p)={direct:.12} c(p)+p={:.12} defect {defect:.3e} {}",
            pt.p,
            pt.c + pt.p,
            verdict(pass)
        );
        rows.push(json!({ "p": pt.p, "direct": direct, "reflected": pt.c + pt.p, "defect": defect, "passed": pass }));
    }
    if rows.is_empty() {
        println!("symmetry: no positive p in the grid, nothing to compare");
    }
    Ok((json!({ "tol": SYMMETRY_TOL, "points": rows, "passed": ok }), ok))
}

fn matrix_oracle(grid: &[f64], opts: &MinimaxOptions) -> Result<(Value, bool), Failure> {
    let a = [[2.0, -1.0], [-1.0, 2.0]];
    let op = DiscreteOperator::from_matrix(DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]))?;
    let mut rows = Vec::new();
    let mut ok = true;
    for &p in grid {
        let pt = newton_refine(&mountain_pass_cp(p, &op, opts)?, &op)?;
        let levels = dense_scan_oracle(a, p, ORACLE_RESOLUTION)?;
        let scan = minimal_level_above(&levels, 1.0).unwrap_or(f64::NAN);
        let diff = (pt.c - scan).abs();
        let pass = diff <= ORACLE_TOL;
        ok &= pass;
        println!("oracle p={p:<6} minimax={:.12} scan={scan:.12} diff {diff:.3e} {}", pt.c, verdict(pass));
        rows.push(json!({ "p": p, "minimax": pt.c, "scan": scan, "difference": diff, "passed": pass }));
    }
    Ok((json!({ "matrix": a, "resolution": ORACLE_RESOLUTION, "tol": ORACLE_TOL, "points": rows, "passed": ok }), ok))
}

pub fn curve(a: &CurveArgs) -> Outcome {
    let grid = parse_grid(&a.p)?;
    let opts = minimax_options(a)?;
    let op = build_operator(&a.grid)?;
    let trace = trace_curve(&grid, &op, &opts)?;
    let lambda1 = trace.lambda1;
    let lambda2 = (a.grid.dimension + 1) as f64 / 2.0;
    for (pt, src) in trace.points.iter().zip(&trace.sources) {
        println!(
            "p={:<6} alpha={:.12} beta={:.12} grad={:.2e} residual={:.2e} {src:?}",
            pt.p,
            pt.alpha(),
            pt.beta(),
            pt.grad_norm,
            pt.residual
        );
    }
    for g in &trace.gaps {
        println!("gap p={} {}", g.p, g.reason);
    }
    let probe_cfg = ProbeConfig { seed: a.seed, ..ProbeConfig::default() };
    let probe_at: Vec<usize> = if a.checks.contains(&CheckArg::Probe) { vec![0] } else { Vec::new() };
    let report = verify_curve_properties(&trace, &op, &probe_at, &probe_cfg)?;
    let mut passed = report.passed;
    for c in [&report.lipschitz, &report.monotone, &report.asymptote] {
        if c.applicable {
            println!("{}: worst {:.3e} {} ({})", c.name, c.worst, verdict(c.passed), c.detail);
        }
    }
    for p in &report.probes {
        println!(
            "probe p={}: {} converged of {} starts, {} below the curve {}",
            p.p,
            p.converged,
            p.attempts,
            p.violations.len(),
            verdict(p.passed)
        );
    }
    let mut body = json!({
        "grid": grid,
        "lambda1": lambda1,
        "options": opts,
        "sources": trace.sources,
        "gaps": trace.gaps,
        "reflection_checks": trace.symmetry,
        "properties": report,
    });
    if a.checks.contains(&CheckArg::Symmetry) {
        let (s, ok) = symmetry_check(&trace, &op, &opts)?;
        passed &= ok;
        body["symmetry"] = s;
    }
    if a.oracle == Some(OracleArg::Matrix) {
        let (o, ok) = matrix_oracle(&grid, &opts)?;
        passed &= ok;
        body["oracle"] = o;
    }
    body["passed"] = json!(passed);

    let rows = CurveRow::from_trace(&trace);
    let csv_name = format!("{}.csv", a.name);
    let csv_path = out_path(&a.grid.out_dir, &csv_name)?;
    let file = fs::File::create(&csv_path).map_err(|e| io_err(&csv_path, e))?;
    write_curve_csv(&rows, file)?;
    let mut files = vec![csv_name];
    if a.svg {
        let svg_name = format!("{}.svg", a.name);
        write_text(&out_path(&a.grid.out_dir, &svg_name)?, &render_svg(&rows, lambda1, lambda2))?;
        files.push(svg_name);
    }
    files.push(format!("{}.json", a.name));
    write_manifest(&a.grid.out_dir, &a.name, "curve", files, body)?;
    println!("curve: {} points, {} gaps -> {}", rows.len(), trace.gaps.len(), verdict(passed));
    Ok(passed)
}

pub fn nonlinear(a: &NonlinearArgs) -> Outcome {
    if a.nodes < 5 || !(a.radius > 0.0) {
        return Err(config("--nodes must be at least 5 and --radius positive"));
    }
    let disc = Discretization::finite_difference(a.nodes, a.radius, 0.0)?;
    let op = DiscreteOperator::assemble(&disc)?;
    let family = match a.family {
        FamilyArg::Notched => Family::notched(),
        FamilyArg::Saturating => Family::Saturating,
    };
    let nl = Nonlinearity::new(a.f0, a.finf, family);
    let (lambda1, _) = op.ground_state()?;
    nl.validate(lambda1).map_err(|e| config(e.to_string()))?;
    let opts = NonlinearOptions { seed: a.seed, ..NonlinearOptions::default() };
    let pair = match solve_two_solutions(&nl, &op, &opts) {
        Ok(p) => p,
        Err(e) => {
            println!("nonlinear: {e}");
            if nl.excludes_positive_solutions(lambda1) {
                println!("nonlinear: f(t)/t > λ₁ for every t > 0, so no positive solution exists for this family");
            }
            let body = json!({
                "nonlinearity": nl,
                "lambda1": lambda1,
                "error": e.to_string(),
                "excludes_positive_solutions": nl.excludes_positive_solutions(lambda1),
                "passed": false,
            });
            write_manifest(&a.out_dir, "nonlinear", "nonlinear", vec!["nonlinear.json".into()], body)?;
            return Ok(false);
        }
    };
    let report = pair.verify()?;
    for (name, u) in [("u1.csv", &pair.u1), ("u2.csv", &pair.u2)] {
        let path = out_path(&a.out_dir, name)?;
        let file = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
        write_profile_csv(u, file)?;
    }
    println!(
        "I(u1) = {:.6e}  I(u2) = {:.6e}  residuals {:.2e} {:.2e}  min samples {:.2e} {:.2e}  separation {:.4}",
        report.energies[0],
        report.energies[1],
        report.residuals[0],
        report.residuals[1],
        report.min_samples[0],
        report.min_samples[1],
        report.separation
    );
    println!("nonlinear -> {}", verdict(report.passed));
    let body = json!({
        "nonlinearity": nl,
        "lambda1": lambda1,
        "options": opts,
        "geometry": pair.geometry,
        "descent_iterations": pair.descent_iterations,
        "pass_iterations": pair.pass_iterations,
        "report": report,
        "passed": report.passed,
    });
    write_manifest(
        &a.out_dir,
        "nonlinear",
        "nonlinear",
        vec!["u1.csv".into(), "u2.csv".into(), "nonlinear.json".into()],
        body,
    )?;
    Ok(report.passed)
}

pub fn plot(a: &PlotArgs) -> Outcome {
    if a.dimension == 0 {
        return Err(config("--n must be positive"));
    }
    let bytes = fs::read(&a.input).map_err(|e| io_err(&a.input, e))?;
    let rows = if bytes.iter().all(|b| b.is_ascii_whitespace()) {
        Vec::new()
    } else {
        read_curve_csv(bytes.as_slice()).map_err(|e| config(format!("{}: {e}", a.input.display())))?
    };
    let svg = render_svg(&rows, a.dimension as f64 / 2.0, (a.dimension + 1) as f64 / 2.0);
    let path = match &a.output {
        Some(p) => p.clone(),
        None => {
            let stem = a.input.file_stem().and_then(|s| s.to_str()).unwrap_or("curve");
            out_path(&a.out_dir, &format!("{stem}.svg"))?
        }
    };
    write_text(&path, &svg)?;
    println!("plot: {} vertices -> {}", rows.len(), path.display());
    Ok(true)
}

pub fn verify(a: &VerifyArgs) -> Outcome {
    if a.samples == 0 {
        return Err(config("--samples must be positive"));
    }
    let op = build_operator(&a.grid)?;
    let mut body = json!({ "dimension": a.grid.dimension, "seed": a.seed });
    let mut passed = true;
    let run = |s: SuiteArg| a.suite == s || a.suite == SuiteArg::All;
    if run(SuiteArg::Identities) {
        let r = identity_suite(&op, a.samples, 10.0, a.seed)?;
        println!(
            "identities: {} samples, reflection {:.2e}, lower bound excess {:.2e}, gradient {:.2e} -> {}",
            r.samples,
            r.reflection_defect,
            r.lower_bound_excess,
            r.gradient_error,
            verdict(r.passed)
        );
        passed &= r.passed;
        body["identities"] = json!(r);
    }
    if run(SuiteArg::Spectrum) {
        let (kmax, tol) = match (a.grid.backend, a.grid.dimension) {
            (BackendArg::Spectral, 1) => (12, 1e-12),
            (BackendArg::Spectral, _) => (6, 1e-12),
            (BackendArg::Fd, _) => (6, 2e-3),
        };
        let es = op.eigensystem(count_through_level(a.grid.dimension, kmax).min(op.reduced_dim()))?;
        let r = verify_spectrum(&es, a.grid.dimension, tol);
        let ok = r.passed && r.levels.len() == kmax;
        println!("spectrum: {} levels, max error {:.2e} -> {}", r.levels.len(), r.max_error, verdict(ok));
        passed &= ok;
        body["spectrum"] = json!(r);
    }
    if run(SuiteArg::TrivialLines) {
        let (l1, phi) = op.ground_state()?;
        let mut worst = 0.0f64;
        for p in [0.0, 1.0, 5.0] {
            worst = worst.max(fucik_residual(&phi, FucikPoint { alpha: l1, beta: l1 - p }, &op)?);
            worst = worst.max(fucik_residual(&phi.neg(), FucikPoint { alpha: l1 + p, beta: l1 }, &op)?);
        }
        let ok = worst < 1e-10;
        println!("trivial lines: max residual {worst:.2e} -> {}", verdict(ok));
        passed &= ok;
        body["trivial_lines"] = json!({ "max_residual": worst, "passed": ok });
    }
    body["passed"] = json!(passed);
    write_manifest(&a.grid.out_dir, "verify", "verify", vec!["verify.json".into()], body)?;
    Ok(passed)
}
