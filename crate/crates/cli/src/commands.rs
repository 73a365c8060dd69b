use std::fmt::Write;

use serde::Serialize;

use qmarg::bipartite::{
    parthasarathy_bound, perturbation_freedom, ppt_check, trace_out_a, trace_out_b,
    validate_state, PerturbationReport, StateCheck,
};
use qmarg::cpmaps::{self, choi_extremality, doubly_constrained_extremality, kraus_from_state};
use qmarg::scaling::{random_kraus, sinkhorn_scale};
use qmarg::{
    numerical_rank, ComplexMatrix, Error, ExtremalityReport, KrausMap, PptReport, PptVerdict,
    ScalingConfig, ScalingReport, StateFile,
};

use crate::error::CliError;
use crate::io::{load, to_json, write_text};
use crate::text;

/// Where a command's primary report goes and how it is rendered.
pub struct Output {
    pub json: bool,
    /// Report goes to stderr when a data file occupies stdout.
    pub to_stderr: bool,
}

impl Output {
    fn emit<R: Serialize>(&self, report: &R, render: impl FnOnce(&R, &mut String)) {
        let body = if self.json {
            to_json(report)
        } else {
            let mut s = String::new();
            render(report, &mut s);
            s
        };
        if self.to_stderr {
            eprint!("{body}");
        } else {
            print!("{body}");
        }
    }
}

fn check_dims(expected: Option<(usize, usize)>, actual: (usize, usize)) -> Result<(), CliError> {
    match expected {
        Some(d) if d != actual => Err(Error::DimensionMismatch(format!(
            "--dims {},{} but input is {},{}",
            d.0, d.1, actual.0, actual.1
        ))
        .into()),
        _ => Ok(()),
    }
}

fn verdict_word(extreme: bool) -> &'static str {
    if extreme {
        "extreme"
    } else {
        "not extreme"
    }
}

#[derive(Debug, Serialize)]
pub struct KrausCheck {
    /// Largest entrywise gap between the family's Choi matrix and the state.
    pub choi_deviation: f64,
    pub matches_state: bool,
    pub extremality: ExtremalityReport,
}

#[derive(Debug, Serialize)]
pub struct VerificationReport {
    pub dim_a: usize,
    pub dim_b: usize,
    pub tol: f64,
    pub valid: bool,
    pub check: StateCheck,
    /// `tr_B ρ` and `tr_A ρ`; absent when the matrix has the wrong shape.
    pub marginal_a: Option<ComplexMatrix>,
    pub marginal_b: Option<ComplexMatrix>,
    pub rank: Option<usize>,
    pub rank_bound: usize,
    pub rank_bound_ok: Option<bool>,
    pub ppt: Option<PptReport>,
    pub perturbation: Option<PerturbationReport>,
    pub kraus: Option<KrausCheck>,
}

pub fn verify_state(
    state_path: &str,
    kraus_path: Option<&str>,
    dims: Option<(usize, usize)>,
    tol: f64,
    out: &Output,
) -> Result<bool, CliError> {
    let file: StateFile = load(state_path)?;
    let (n, m) = (file.dim_a, file.dim_b);
    check_dims(dims, (n, m))?;
    let kraus: Option<KrausMap> = kraus_path.map(load).transpose()?;
    if let Some(k) = &kraus {
        check_dims(Some((n, m)), (k.n(), k.m()))?;
    }

    let check = qmarg::bipartite::check_state(&file.matrix, n, m, tol);
    let shaped = file.matrix.shape() == (n * m, n * m) && n > 0 && m > 0;
    let valid = check.is_valid();
    let rank = shaped.then(|| numerical_rank(&file.matrix, tol));
    let rank_bound = parthasarathy_bound(n, m);
    let (mut ppt, mut perturbation) = (None, None);
    if valid {
        let rho = validate_state(file.matrix.clone(), n, m, tol)?;
        ppt = Some(ppt_check(&rho, tol)?);
        perturbation = Some(perturbation_freedom(&rho, tol)?);
    }
    let kraus = kraus.map(|k| {
        let choi_deviation = k.choi_matrix().max_abs_diff(&file.matrix);
        KrausCheck {
            choi_deviation,
            matches_state: choi_deviation <= tol,
            extremality: doubly_constrained_extremality(&k, tol),
        }
    });
    let report = VerificationReport {
        dim_a: n,
        dim_b: m,
        tol,
        valid,
        marginal_a: shaped.then(|| trace_out_b(&file.matrix, n, m)),
        marginal_b: shaped.then(|| trace_out_a(&file.matrix, n, m)),
        rank,
        rank_bound,
        rank_bound_ok: rank.map(|r| r <= rank_bound),
        check,
        ppt,
        perturbation,
        kraus,
    };
    out.emit(&report, render_verification);
    Ok(valid)
}

fn render_verification(r: &VerificationReport, s: &mut String) {
    let _ = writeln!(s, "state on C^{} ⊗ C^{} (tol {})", r.dim_a, r.dim_b, text::num(r.tol));
    let _ = writeln!(s, "valid: {}", r.valid);
    for v in &r.check.violations {
        let _ = writeln!(s, "  violation: {v}");
    }
    let _ = writeln!(
        s,
        "hermitian deviation {}  trace {}  min eigenvalue {}",
        text::num(r.check.hermitian_deviation),
        text::num(r.check.trace),
        r.check.min_eigenvalue.map_or("-".into(), text::num)
    );
    if let Some(a) = &r.marginal_a {
        text::matrix(s, "marginal tr_B", a);
    }
    if let Some(b) = &r.marginal_b {
        text::matrix(s, "marginal tr_A", b);
    }
    if let (Some(rank), Some(ok)) = (r.rank, r.rank_bound_ok) {
        let _ = writeln!(s, "rank {rank}  bound {}  within bound: {ok}", r.rank_bound);
        if !ok {
            let _ = writeln!(s, "rank exceeds bound: cannot be extreme");
        }
    }
    if let Some(p) = &r.ppt {
        text::ppt(s, p);
    }
    if let Some(p) = &r.perturbation {
        let _ = writeln!(
            s,
            "perturbation space: dimension {} ({} parameters, constraint rank {})  verdict: {}",
            p.dimension,
            p.parameters,
            p.constraint_rank,
            verdict_word(p.is_extreme())
        );
    }
    if let Some(k) = &r.kraus {
        let _ = writeln!(
            s,
            "Kraus family: Choi deviation {}  matches state: {}",
            text::num(k.choi_deviation),
            k.matches_state
        );
        text::extremality(s, &k.extremality);
    }
}

pub fn choi(kraus_path: &str, out_path: &str, tol: f64) -> Result<bool, CliError> {
    let phi: KrausMap = load(kraus_path)?;
    let state = phi.choi_state(tol)?;
    write_text(out_path, &to_json(&state))?;
    Ok(true)
}

pub fn kraus(
    state_path: &str,
    out_path: &str,
    dims: Option<(usize, usize)>,
    tol: f64,
) -> Result<bool, CliError> {
    let file: StateFile = load(state_path)?;
    check_dims(dims, (file.dim_a, file.dim_b))?;
    let rho = file.validate(tol)?;
    let phi = kraus_from_state(&rho, tol)?;
    write_text(out_path, &to_json(&phi))?;
    Ok(true)
}

#[derive(Debug, Serialize)]
pub struct ExtremalReport {
    pub n: usize,
    pub m: usize,
    pub ops: usize,
    pub tol: f64,
    pub choi: ExtremalityReport,
    pub doubly_constrained: ExtremalityReport,
    /// Absent when the Choi matrix is not a state (trace of K is not one).
    pub perturbation: Option<PerturbationReport>,
}

pub fn extremal_check(
    kraus_path: &str,
    dims: Option<(usize, usize)>,
    tol: f64,
    out: &Output,
) -> Result<bool, CliError> {
    let phi: KrausMap = load(kraus_path)?;
    check_dims(dims, (phi.n(), phi.m()))?;
    let perturbation = match phi.choi_state(tol) {
        Ok(s) => Some(perturbation_freedom(&s, tol)?),
        Err(Error::TraceNotOne { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let report = ExtremalReport {
        n: phi.n(),
        m: phi.m(),
        ops: phi.len(),
        tol,
        choi: choi_extremality(&phi, tol),
        doubly_constrained: doubly_constrained_extremality(&phi, tol),
        perturbation,
    };
    out.emit(&report, |r, s| {
        let _ = writeln!(s, "{} Kraus operators {}x{} (tol {})", r.ops, r.n, r.m, text::num(r.tol));
        text::extremality(s, &r.choi);
        text::extremality(s, &r.doubly_constrained);
        match &r.perturbation {
            Some(p) => {
                let _ = writeln!(s, "perturbation space dimension: {}", p.dimension);
            }
            None => {
                let _ = writeln!(s, "perturbation space: skipped (Choi matrix is not unit trace)");
            }
        }
    });
    Ok(report.doubly_constrained.verdict)
}

pub struct SinkhornArgs {
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub seed: u64,
    pub k_file: Option<String>,
    pub l_file: Option<String>,
    pub max_iter: usize,
    pub residual_tol: f64,
    pub rank_tol: f64,
    pub history_tail: Option<usize>,
    pub out: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SinkhornReport {
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub residual_tol: f64,
    pub rank_tol: f64,
    pub target_k: ComplexMatrix,
    pub target_l: ComplexMatrix,
    /// Length of the full residual history, before any truncation.
    pub history_len: usize,
    pub scaling: ScalingReport,
    pub extremality: Option<ExtremalityReport>,
    pub state_rank: Option<usize>,
    pub rank_bound: usize,
    /// The scaled family, unless it was written with `--out`.
    pub map: Option<KrausMap>,
}

fn render_sinkhorn(r: &SinkhornReport, s: &mut String) {
    let _ = writeln!(
        s,
        "operator scaling {}x{}, {} Kraus operators, seed {}",
        r.n, r.m, r.r, r.seed
    );
    let sc = &r.scaling;
    let _ = writeln!(
        s,
        "converged: {}  iterations {}  residual K {}  residual L {}",
        sc.converged,
        sc.iterations,
        text::num(sc.residual_k),
        text::num(sc.residual_l)
    );
    if !sc.history.is_empty() {
        let _ = writeln!(
            s,
            "history (last {} of {}):",
            sc.history.len(),
            r.history_len
        );
        let first = sc.iterations + 1 - sc.history.len();
        for (i, (k, l)) in sc.history.iter().enumerate() {
            let _ = writeln!(s, "  {:>5}  {}  {}", first + i, text::num(*k), text::num(*l));
        }
    }
    if let Some(e) = &r.extremality {
        text::extremality(s, e);
    }
    if let Some(rank) = r.state_rank {
        let _ = writeln!(s, "Choi state rank {rank}  bound {}", r.rank_bound);
    }
    if let Some(map) = &r.map {
        for (i, v) in map.ops().iter().enumerate() {
            text::matrix(s, &format!("V{}", i + 1), v);
        }
    }
}

fn load_target(path: Option<&str>, dim: usize) -> Result<ComplexMatrix, CliError> {
    match path {
        Some(p) => load(p),
        None => Ok(ComplexMatrix::scaled_identity(dim, 1.0 / dim as f64)),
    }
}

pub fn sinkhorn(a: &SinkhornArgs, out: &Output) -> Result<bool, CliError> {
    let (n, m) = (a.n, a.m);
    if n == 0 || m == 0 || a.r == 0 {
        return Err(CliError::Usage(format!(
            "n, m and r must be positive (got {n}, {m}, {})",
            a.r
        )));
    }
    let k = load_target(a.k_file.as_deref(), m)?;
    let l = load_target(a.l_file.as_deref(), n)?;
    if k.shape() != (m, m) || l.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "targets must be K {m}x{m} and L {n}x{n}, got {}x{} and {}x{}",
            k.rows(),
            k.cols(),
            l.rows(),
            l.cols()
        ))
        .into());
    }
    let cfg = ScalingConfig::new(k, l)?
        .with_max_iter(a.max_iter)
        .with_residual_tol(a.residual_tol);
    let phi0 = random_kraus(n, m, a.r, a.seed)?;

    let (map, mut scaling) = match sinkhorn_scale(&phi0, &cfg) {
        Ok((map, rep)) => (Some(map), rep),
        Err(Error::ScalingNoConvergence(rep)) => (None, *rep),
        Err(e) => return Err(e.into()),
    };
    let history_len = scaling.history.len();
    if let Some(t) = a.history_tail {
        scaling.history.drain(..history_len.saturating_sub(t));
    }
    let extremality = map
        .as_ref()
        .map(|p| doubly_constrained_extremality(p, a.rank_tol));
    let state_rank = map
        .as_ref()
        .map(|p| numerical_rank(&p.choi_matrix(), a.rank_tol));
    if let (Some(path), Some(p)) = (&a.out, &map) {
        write_text(path, &to_json(p))?;
    }
    let converged = scaling.converged;
    let report = SinkhornReport {
        n,
        m,
        r: a.r,
        seed: a.seed,
        max_iter: a.max_iter,
        residual_tol: a.residual_tol,
        rank_tol: a.rank_tol,
        target_k: cfg.target_k().clone(),
        target_l: cfg.target_l().clone(),
        history_len,
        scaling,
        extremality,
        state_rank,
        rank_bound: parthasarathy_bound(n, m),
        map: if a.out.is_some() { None } else { map },
    };
    out.emit(&report, render_sinkhorn);
    if !converged {
        eprintln!(
            "error: no convergence within {} iterations (max residual {})",
            a.max_iter,
            text::num(report.scaling.max_residual())
        );
    }
    Ok(converged)
}

#[derive(Debug, Serialize)]
pub struct CheckLine {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct ExampleReport {
    pub tol: f64,
    pub ops: Vec<ComplexMatrix>,
    pub state: ComplexMatrix,
    pub marginal_a: ComplexMatrix,
    pub marginal_b: ComplexMatrix,
    pub eigenvalues: Vec<f64>,
    pub rank: usize,
    pub rank_bound: usize,
    pub ppt: PptReport,
    pub choi: ExtremalityReport,
    pub doubly_constrained: ExtremalityReport,
    pub perturbation: PerturbationReport,
    pub checks: Vec<CheckLine>,
    pub all_pass: bool,
}

/// The expected state, built from its closed-form entries.
fn expected_example_state() -> ComplexMatrix {
    let c = 1.0 / (3.0 * 2f64.sqrt());
    let mut e = ComplexMatrix::zeros(6, 6);
    for (i, v) in [(1, 1.0 / 6.0), (4, 1.0 / 6.0), (2, 1.0 / 3.0), (3, 1.0 / 3.0)] {
        e[(i, i)] = v.into();
    }
    for (i, j) in [(1, 3), (3, 1), (2, 4), (4, 2)] {
        e[(i, j)] = c.into();
    }
    e
}

pub fn example(tol: f64, out: &Output) -> Result<bool, CliError> {
    let phi = cpmaps::extremal_example();
    let rho = phi.choi_state(tol)?;
    let (n, m) = rho.dims();
    let marginal_a = trace_out_b(rho.matrix(), n, m);
    let marginal_b = trace_out_a(rho.matrix(), n, m);
    let eigenvalues = rho.eigenvalues()?;
    let rank = rho.rank(tol);
    let rank_bound = parthasarathy_bound(n, m);
    let ppt = ppt_check(&rho, tol)?;
    let choi = choi_extremality(&phi, tol);
    let doubly_constrained = doubly_constrained_extremality(&phi, tol);
    let perturbation = perturbation_freedom(&rho, tol)?;

    let mut checks = Vec::new();
    let mut check = |name, pass, detail: String| checks.push(CheckLine { name, pass, detail });
    let d = rho.matrix().max_abs_diff(&expected_example_state());
    check("state entries", d <= 1e-14, format!("max deviation {}", text::num(d)));
    let da = marginal_a.max_abs_diff(&ComplexMatrix::scaled_identity(2, 0.5));
    let db = marginal_b.max_abs_diff(&ComplexMatrix::scaled_identity(3, 1.0 / 3.0));
    check("marginal tr_B = 1/2", da <= 1e-14, format!("max deviation {}", text::num(da)));
    check("marginal tr_A = 1/3", db <= 1e-14, format!("max deviation {}", text::num(db)));
    check("rank 2", rank == 2, format!("rank {rank}"));
    let expected = [0.0, 0.0, 0.0, 0.0, 0.5, 0.5];
    let de = eigenvalues
        .iter()
        .zip(expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    check("eigenvalues (1/2, 1/2, 0, 0, 0, 0)", de <= 1e-12, format!("max deviation {}", text::num(de)));
    let dp = (ppt.min_eigenvalue + 1.0 / 6.0).abs();
    check("partial transpose min eigenvalue -1/6", dp <= 1e-12, format!("deviation {}", text::num(dp)));
    check(
        "entangled",
        ppt.verdict == PptVerdict::Entangled,
        format!("verdict {}", ppt.verdict),
    );
    check(
        "Choi criterion extreme",
        choi.verdict,
        format!("stacked rank {}/{}", choi.stacked_rank, choi.family_size),
    );
    check(
        "doubly constrained criterion extreme",
        doubly_constrained.verdict,
        format!(
            "stacked rank {}/{}",
            doubly_constrained.stacked_rank, doubly_constrained.family_size
        ),
    );
    check(
        "perturbation space trivial",
        perturbation.is_extreme(),
        format!("dimension {}", perturbation.dimension),
    );
    check(
        "rank within bound",
        rank <= rank_bound,
        format!("{rank} <= {rank_bound}"),
    );
    let all_pass = checks.iter().all(|c| c.pass);

    let report = ExampleReport {
        tol,
        ops: phi.ops().to_vec(),
        state: rho.matrix().clone(),
        marginal_a,
        marginal_b,
        eigenvalues,
        rank,
        rank_bound,
        ppt,
        choi,
        doubly_constrained,
        perturbation,
        checks,
        all_pass,
    };
    out.emit(&report, |r, s| {
        for (i, v) in r.ops.iter().enumerate() {
            text::matrix(s, &format!("V{}", i + 1), v);
        }
        text::matrix(s, "state", &r.state);
        text::matrix(s, "marginal tr_B", &r.marginal_a);
        text::matrix(s, "marginal tr_A", &r.marginal_b);
        let _ = writeln!(s, "eigenvalues: {}", text::list(&r.eigenvalues));
        let _ = writeln!(s, "rank {}  bound {}", r.rank, r.rank_bound);
        text::ppt(s, &r.ppt);
        text::extremality(s, &r.choi);
        text::extremality(s, &r.doubly_constrained);
        let _ = writeln!(s, "perturbation space dimension: {}", r.perturbation.dimension);
        for c in &r.checks {
            let mark = if c.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "{mark} {}: {}", c.name, c.detail);
        }
    });
    Ok(all_pass)
}
