//! `gkzkit`: run one computation on a configuration and print a JSON report.
//!
//! Exit status: 0 success, 1 obstruction or rejection reported, 2 input
//! error, 3 budget exceeded.

mod input;
mod report;

use std::collections::BTreeSet;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gkzkit::config::{
    check_aux_point, is_lattice_redundant, multiplicity_table, reduction_chain, saturate, AuxOutcome, FaceJustification,
    PointConfiguration, SaturationMode,
};
use gkzkit::curves::{
    beukers_generators, discriminant_curve, numeric_generators, numeric_monodromy, principal_determinant_curve,
    verify_factorization, LoopKind, MonomialCurveConfig, StepPolicy, DEFAULT_BUDGET,
};
use gkzkit::hyper::{
    annihilation_check, extend_solution, gamma_series, is_nonresonant, rank_volume, restrict_to_hyperplane,
    TruncatedSeries,
};
use gkzkit::matrix::{Int, Rat};
use gkzkit::polytope::convex_hull;
use gkzkit::secondary::{enumerate_regular_triangulations_capped, gkz_vector, DEFAULT_CAP};
use gkzkit::Error;
use serde_json::{json, Value};

use input::{parse_beta, parse_job, read_source, InputError, Job};
use report::object;

#[derive(Parser, Debug)]
#[command(name = "gkzkit", version, about = "Exact computations for A-hypergeometric systems")]
struct Cli {
    /// Input JSON file, or `-` for stdin.
    #[arg(long, short, global = true, default_value = "-")]
    input: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    S,
    P,
    Full,
}

impl From<Mode> for SaturationMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::S => SaturationMode::S,
            Mode::P => SaturationMode::P,
            Mode::Full => SaturationMode::Full,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReduceMode {
    S,
    P,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CurveAction {
    Edet,
    Disc,
    Verify,
    Monodromy,
}

#[derive(Args, Debug)]
struct BetaArg {
    /// Parameter vector as comma-separated rationals, e.g. `1/5,1/3`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    beta: Option<Vec<String>>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Face lattice of the Newton polytope.
    Faces,
    /// Face saturation, partial face saturation or full saturation.
    Saturate {
        #[arg(long, value_enum)]
        mode: Mode,
    },
    /// Lattice redundancy of one column.
    Redundant {
        #[arg(long)]
        col: usize,
    },
    /// Index, subdiagram volume and multiplicity of every face.
    Mults,
    /// Checks an auxiliary point for removing column `k`.
    AuxCheck {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        a: usize,
    },
    /// Certified chain of additions up to a saturation.
    Reduce {
        #[arg(long, value_enum)]
        mode: ReduceMode,
    },
    /// Secondary polytope, optionally with all regular triangulations.
    /// `GKZKIT_BUDGET` can raise the point cap of the enumeration.
    Secondary {
        #[arg(long)]
        enumerate: bool,
    },
    /// Nonresonance of a parameter vector.
    Nonresonant {
        #[command(flatten)]
        beta: BetaArg,
    },
    /// Gamma-series, or the extension of one from the configuration with
    /// column `col` deleted.
    Series {
        #[arg(long)]
        extend: bool,
        #[arg(long)]
        col: Option<usize>,
        #[arg(long, default_value_t = 6)]
        order: usize,
        /// Columns of the simplex (defaults to the first cell that works).
        #[arg(long, value_delimiter = ',')]
        sigma: Option<Vec<usize>>,
        #[command(flatten)]
        beta: BetaArg,
    },
    /// Monomial curves: principal determinant, discriminant, factorization
    /// check or monodromy.
    Curve {
        #[arg(value_enum)]
        action: CurveAction,
        /// Toric degree; the curve defaults to `{0, 1, δ}`.
        #[arg(long)]
        delta: Option<i64>,
        /// Full exponent list, e.g. `0,1,2,3`.
        #[arg(long, value_delimiter = ',')]
        exponents: Option<Vec<i64>>,
        #[command(flatten)]
        beta: BetaArg,
    },
}

/// Why a job ended without a full result.
#[derive(Debug)]
enum Failure {
    Input(String),
    Rejected(String),
    Budget(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Rejected(_) => 1,
            Failure::Input(_) => 2,
            Failure::Budget(_) => 3,
        }
    }

    fn status(&self) -> &'static str {
        match self {
            Failure::Rejected(_) => "rejected",
            Failure::Input(_) => "input_error",
            Failure::Budget(_) => "budget_exceeded",
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Rejected(m) | Failure::Budget(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Budget(_) | Error::CapExceeded { .. } => Failure::Budget(msg),
            Error::Hypothesis(_)
            | Error::Resonance(_)
            | Error::Numeric(_)
            | Error::Inconsistent
            | Error::Torsion(_)
            | Error::NotContained(_)
            | Error::DegenerateHeights { .. } => Failure::Rejected(msg),
            _ => Failure::Input(msg),
        }
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        match e {
            InputError::Library(inner) => inner.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

/// A finished computation; `rejection` downgrades the exit status to 1
/// while still reporting the result.
struct Outcome {
    result: Value,
    rejection: Option<String>,
}

fn ok(result: Value) -> Result<Outcome, Failure> {
    Ok(Outcome { result, rejection: None })
}

fn budget() -> Result<i64, Failure> {
    match std::env::var("GKZKIT_BUDGET") {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Input(format!("GKZKIT_BUDGET={v:?} is not an integer"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn enumeration_cap() -> Result<usize, Failure> {
    match std::env::var("GKZKIT_BUDGET") {
        Ok(_) => Ok(usize::try_from(budget()?).unwrap_or(0).max(DEFAULT_CAP)),
        Err(_) => Ok(DEFAULT_CAP),
    }
}

fn job(cli: &Cli) -> Result<Job, Failure> {
    Ok(parse_job(&read_source(&cli.input)?)?)
}

fn beta_for(arg: &BetaArg, job_beta: Option<&Vec<Rat>>) -> Result<Vec<Rat>, Failure> {
    match (&arg.beta, job_beta) {
        (Some(b), _) => Ok(parse_beta(b)?),
        (None, Some(b)) => Ok(b.clone()),
        (None, None) => Err(Failure::Input("a parameter vector is required (--beta or \"beta\" in the input)".into())),
    }
}

fn faces(a: &PointConfiguration) -> Result<Outcome, Failure> {
    let faces: Vec<Value> = a.faces().iter().map(report::face).collect();
    ok(json!({ "dim": a.dim(), "faces": faces, "vertices": a.polytope().vertices() }))
}

fn saturation(a: &PointConfiguration, mode: SaturationMode) -> Result<Outcome, Failure> {
    let s = saturate(a, mode)?;
    ok(json!({
        "added_points": report::points(&s.added_points),
        "mode": mode.to_string(),
        "points": report::points(&s.result.columns()),
    }))
}

fn redundant(a: &PointConfiguration, col: usize) -> Result<Outcome, Failure> {
    let r = is_lattice_redundant(a, col)?;
    let changed: Vec<Value> = r.per_face.iter().filter(|(_, same)| !same).map(|(f, _)| report::face(f)).collect();
    ok(json!({
        "changed_faces": changed,
        "column": r.column,
        "is_vertex": r.is_vertex,
        "redundant": r.redundant,
    }))
}

fn mults(a: &PointConfiguration) -> Result<Outcome, Failure> {
    let rows: Vec<Value> = multiplicity_table(a)?
        .iter()
        .map(|r| {
            json!({
                "face": report::face(&r.face),
                "index": report::int(&r.index_i),
                "multiplicity": report::int(&r.mult_m),
                "subdiagram_volume": report::int(&r.subvol_v),
            })
        })
        .collect();
    ok(json!({ "table": rows }))
}

fn justification(j: &FaceJustification) -> Value {
    match j {
        FaceJustification::EqualMultiplicity(m) => json!({ "equal_multiplicity": report::int(m) }),
        FaceJustification::LatticeMembership => json!("lattice_membership"),
        FaceJustification::Pyramid => json!("pyramid"),
    }
}

fn aux_check(a: &PointConfiguration, k: usize, aux: usize) -> Result<Outcome, Failure> {
    match check_aux_point(a, k, aux)? {
        AuxOutcome::Certified(c) => {
            let faces: Vec<Value> =
                c.faces.iter().map(|(f, j)| json!({ "face": report::face(f), "justification": justification(j) })).collect();
            ok(json!({ "a": c.a, "certified": true, "faces": faces, "gamma1": report::face(&c.gamma1), "k": c.k }))
        }
        AuxOutcome::Rejected(why) => Ok(Outcome {
            result: json!({ "a": aux, "certified": false, "k": k, "reason": why.clone() }),
            rejection: Some(why),
        }),
    }
}

fn reduce(a: &PointConfiguration, mode: SaturationMode) -> Result<Outcome, Failure> {
    let chain = reduction_chain(a, mode)?;
    let steps: Vec<Value> = chain
        .steps
        .iter()
        .map(|s| json!({ "added": report::ints(&s.added), "face": report::face(&s.face), "witness": report::ints(&s.witness) }))
        .collect();
    let obstruction = chain.obstruction.as_ref().map(|o| report::points(o));
    let result = json!({
        "complete": chain.is_complete(),
        "end": report::points(&chain.end.columns()),
        "mode": mode.to_string(),
        "obstruction": obstruction,
        "steps": steps,
    });
    let rejection = chain.obstruction.as_ref().map(|o| format!("{} saturation points could not be certified", o.len()));
    Ok(Outcome { result, rejection })
}

fn secondary(a: &PointConfiguration, enumerate: bool) -> Result<Outcome, Failure> {
    let cap = enumeration_cap()?;
    let ts = enumerate_regular_triangulations_capped(a, cap)?;
    let vecs: BTreeSet<Vec<Int>> = ts.iter().map(|t| gkz_vector(a, t)).collect();
    let sp = convex_hull(&vecs.into_iter().collect::<Vec<_>>())?;
    let vertices: Vec<Value> = sp.vertices().iter().map(|&v| report::ints(&sp.points()[v])).collect();
    let mut out = vec![
        ("dim", json!(sp.dim())),
        ("triangulation_count", json!(ts.len())),
        ("vertices", Value::Array(vertices)),
    ];
    if enumerate {
        let list: Vec<Value> = ts
            .iter()
            .map(|t| json!({ "cells": t.cells, "gkz_vector": report::ints(&gkz_vector(a, t)), "volumes": report::ints(&t.volumes) }))
            .collect();
        out.push(("triangulations", Value::Array(list)));
    }
    ok(object(out))
}

fn nonresonant(a: &PointConfiguration, beta: &[Rat]) -> Result<Outcome, Failure> {
    let r = is_nonresonant(a, beta)?;
    let witness = r.witness.as_ref().map(|w| {
        json!({
            "facet": report::face(&w.facet),
            "functionals": report::points(&w.functionals),
            "values": report::rats(&w.values),
        })
    });
    ok(json!({
        "beta": report::rats(beta),
        "nonresonant": r.nonresonant,
        "rank_volume": report::int(&rank_volume(a)),
        "witness": witness,
    }))
}

/// First simplex (from `--sigma` or a pulling triangulation) whose
/// Gamma-series exists for `β`.
fn pick_series(a: &PointConfiguration, beta: &[Rat], sigma: Option<&[usize]>, order: usize) -> Result<TruncatedSeries, Failure> {
    if let Some(s) = sigma {
        return Ok(gamma_series(a.matrix(), beta, s, order)?);
    }
    let mut last = None;
    for cell in a.polytope().triangulate() {
        match gamma_series(a.matrix(), beta, &cell, order) {
            Ok(s) => return Ok(s),
            Err(e) => last = Some(e),
        }
    }
    Err(last.map(Failure::from).unwrap_or_else(|| Failure::Rejected("no simplex available".into())))
}

fn series(
    a: &PointConfiguration,
    beta: &[Rat],
    extend: bool,
    col: Option<usize>,
    order: usize,
    sigma: Option<&[usize]>,
) -> Result<Outcome, Failure> {
    if !extend {
        let s = pick_series(a, beta, sigma, order)?;
        let check = annihilation_check(&s, beta)?;
        return ok(json!({
            "annihilation": { "failures": check.failures.len(), "indeterminate": check.indeterminate, "vanishing": check.vanishing },
            "series": report::series(&s),
        }));
    }
    let k = col.ok_or_else(|| Failure::Input("--extend needs --col".into()))?;
    if k >= a.len() {
        return Err(Error::InvalidColumn(k).into());
    }
    let a_k = a.remove(k)?;
    let psi = pick_series(&a_k, beta, sigma, order)?;
    let ext = extend_solution(&psi, a, k, beta, order)?;
    let check = annihilation_check(&ext.series, beta)?;
    let back = restrict_to_hyperplane(&ext.series, k)?;
    let restores = back.base() == psi.base() && back.terms() == psi.terms();
    let failures: Vec<Value> = check
        .failures
        .iter()
        .map(|f| json!({ "offset": f.offset, "operator": format!("{:?}", f.operator), "value": report::rat(&f.value) }))
        .collect();
    let result = json!({
        "annihilation": { "failures": failures, "indeterminate": check.indeterminate, "vanishing": check.vanishing },
        "column": k,
        "extension": report::series(&ext.series),
        "input_series": report::series(&psi),
        "representatives": ext.representatives,
        "restriction_matches_input": restores,
    });
    let rejection = (!check.passed() || !restores).then(|| "extension failed its checks".to_string());
    Ok(Outcome { result, rejection })
}

fn curve_config(delta: Option<i64>, exponents: Option<&[i64]>) -> Result<MonomialCurveConfig, Failure> {
    let cfg = match (exponents, delta) {
        (Some(e), _) => MonomialCurveConfig::new(e)?,
        (None, Some(d)) if d >= 1 => MonomialCurveConfig::triple(d)?,
        (None, Some(d)) => return Err(Failure::Input(format!("toric degree {d} must be positive"))),
        (None, None) => return Err(Failure::Input("curve needs --delta or --exponents".into())),
    };
    if let (Some(d), Some(_)) = (delta, exponents) {
        if cfg.delta() != d {
            return Err(Failure::Input(format!("--delta {d} disagrees with the exponents (δ = {})", cfg.delta())));
        }
    }
    Ok(cfg)
}

fn curve(action: CurveAction, cfg: &MonomialCurveConfig, beta: Option<Vec<Rat>>) -> Result<Outcome, Failure> {
    let header = [("delta", json!(cfg.delta())), ("exponents", json!(cfg.exponents()))];
    match action {
        CurveAction::Edet => {
            let p = principal_determinant_curve(cfg, budget()?)?;
            ok(object(header.into_iter().chain([("principal_determinant", report::polynomial(&p))])))
        }
        CurveAction::Disc => {
            let d = discriminant_curve(cfg, budget()?)?;
            let defective = d.is_constant();
            ok(object(header.into_iter().chain([("defective", json!(defective)), ("discriminant", report::polynomial(&d))])))
        }
        CurveAction::Verify => {
            let r = verify_factorization(cfg, budget()?)?;
            let faces: Vec<Value> = r
                .faces
                .iter()
                .map(|f| json!({ "columns": f.face, "expected": report::int(&f.expected), "found": f.found }))
                .collect();
            let result = object(header.into_iter().chain([
                ("discriminant", report::polynomial(&r.discriminant)),
                ("faces", Value::Array(faces)),
                ("holds", json!(r.holds())),
                ("newton_vertices", report::points(&r.newton_vertices)),
                ("principal_determinant", report::polynomial(&r.principal)),
                ("secondary_vertices", report::points(&r.secondary_vertices)),
                ("stray_coordinates", json!(r.stray_coordinates)),
            ]));
            let rejection = (!r.holds()).then(|| "factorization check failed".to_string());
            Ok(Outcome { result, rejection })
        }
        CurveAction::Monodromy => {
            let beta = beta.ok_or_else(|| Failure::Input("monodromy needs --beta".into()))?;
            monodromy(cfg.delta(), &beta)
        }
    }
}

fn monodromy(delta: i64, beta: &[Rat]) -> Result<Outcome, Failure> {
    let policy = StepPolicy::default();
    let loops = [LoopKind::Origin, LoopKind::Discriminant, LoopKind::Infinity, LoopKind::Trivial];
    let rep = numeric_monodromy(delta, beta, &loops, policy)?;
    let loops: Vec<Value> = rep
        .loops
        .iter()
        .map(|l| json!({ "invariants": report::invariants(&l.invariants), "loop": l.kind.name(), "matrix": report::cmatrix(&l.matrix), "steps": l.steps }))
        .collect();
    let mut out = vec![
        ("basepoint", report::complex(&rep.basepoint)),
        ("beta", report::rats(beta)),
        ("delta", json!(delta)),
        ("discriminant_point", report::rat(&rep.ode.discriminant_point())),
        ("loops", Value::Array(loops)),
        ("tolerance", json!(policy.tolerance)),
    ];
    let mut rejection = None;
    if delta == 3 {
        let num = numeric_generators(delta, beta, policy)?;
        let exact = beukers_generators(delta, beta)?;
        let (ni, ei) = (num.invariants(), exact.invariants());
        let deviation = ni.iter().zip(&ei).map(|(x, y)| x.max_diff(y)).fold(0.0, f64::max);
        let agree = deviation < 1e-6;
        if !agree {
            rejection = Some(format!("numeric and closed-form invariants differ by {deviation:e}"));
        }
        out.push((
            "generators",
            json!({
                "closed_form": exact.matrices.iter().map(report::cmatrix).collect::<Vec<_>>(),
                "invariants_agree": agree,
                "max_deviation": deviation,
                "numeric": num.matrices.iter().map(report::cmatrix).collect::<Vec<_>>(),
                "numeric_invariants": ni.iter().map(report::invariants).collect::<Vec<_>>(),
            }),
        ));
    }
    Ok(Outcome { result: object(out), rejection })
}

fn run(cli: &Cli) -> Result<(Value, Outcome), Failure> {
    let mut echo = Value::Null;
    let mut load = || -> Result<Job, Failure> {
        let j = job(cli)?;
        echo = j.echo.clone();
        Ok(j)
    };
    let outcome = match &cli.command {
        Command::Faces => faces(&load()?.config),
        Command::Saturate { mode } => saturation(&load()?.config, (*mode).into()),
        Command::Redundant { col } => redundant(&load()?.config, *col),
        Command::Mults => mults(&load()?.config),
        Command::AuxCheck { k, a } => aux_check(&load()?.config, *k, *a),
        Command::Reduce { mode } => {
            let m = match mode {
                ReduceMode::S => SaturationMode::S,
                ReduceMode::P => SaturationMode::P,
            };
            reduce(&load()?.config, m)
        }
        Command::Secondary { enumerate } => secondary(&load()?.config, *enumerate),
        Command::Nonresonant { beta } => {
            let j = load()?;
            let b = beta_for(beta, j.beta.as_ref())?;
            nonresonant(&j.config, &b)
        }
        Command::Series { extend, col, order, sigma, beta } => {
            let j = load()?;
            let b = beta_for(beta, j.beta.as_ref())?;
            series(&j.config, &b, *extend, *col, *order, sigma.as_deref())
        }
        Command::Curve { action, delta, exponents, beta } => {
            let cfg = curve_config(*delta, exponents.as_deref())?;
            let b = beta.beta.as_deref().map(parse_beta).transpose()?;
            curve(*action, &cfg, b)
        }
    };
    outcome.map(|o| (echo, o))
}

fn options_echo() -> Value {
    Value::Array(std::env::args().skip(1).map(Value::String).collect())
}

fn emit(report: &Value) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(report).expect("JSON values serialize");
    // a closed pipe downstream is not our failure
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let version = env!("CARGO_PKG_VERSION");
    match run(&cli) {
        Ok((input, outcome)) => {
            let status = if outcome.rejection.is_some() { "rejected" } else { "ok" };
            if let Some(why) = &outcome.rejection {
                eprintln!("gkzkit: {why}");
            }
            emit(&json!({
                "args": options_echo(),
                "input": input,
                "result": outcome.result,
                "status": status,
                "version": version,
            }));
            ExitCode::from(if outcome.rejection.is_some() { 1 } else { 0 })
        }
        Err(f) => {
            eprintln!("gkzkit: {}", f.message());
            emit(&json!({
                "args": options_echo(),
                "error": f.message(),
                "status": f.status(),
                "version": version,
            }));
            ExitCode::from(f.code())
        }
    }
}
