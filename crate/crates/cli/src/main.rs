//! Command line front end: exact bracket checks, witness problems, derivation
//! spaces, and the local-derivation reduction pipeline.
//!
//! Exit codes: 0 when the check passes or a decomposition/witness is found,
//! 1 on a certified violation or rejection, 2 on usage and input errors.
//! With `--json` every command prints a single JSON object whose key order is
//! fixed; `timing_ms` is always the last key and is the only
//! nondeterministic field.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use loopvir::algebra::{antisymmetry_check, jacobi_check, verify_construction, Construction};
use loopvir::localder::{
    check_center, decompose, DecomposeConfig, DecompositionOutcome, ProbeSpec,
    PureCentralOutcome, StageRecord,
};
use loopvir::solver::{
    default_support_window, witness_solve, DEFAULT_WITNESS_CAP, DEFAULT_WITNESS_SLACK,
};
use loopvir::{
    bracket, derivation_space, parse_algebra, parse_element, parse_map_file,
    render_element, render_symbol, AlgebraError, AlgebraSpec, BasisSymbol, DerivationDescriptor,
    Element, FormatError, MapError, PipelineError, QSqrt2, SolveError, WindowedLinearMap,
    WitnessOutcome, WitnessRejection,
};

#[derive(Parser)]
#[command(
    name = "loopvir",
    version,
    about = "Exact bracket calculus and local-derivation decisions for truncated loop Virasoro algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check antisymmetry and the Jacobi identity on a degree window
    VerifyAlgebra(VerifyAlgebraArgs),
    /// Check the bracket identities of a primed basis construction
    VerifyConstruction(VerifyConstructionArgs),
    /// Check the Leibniz identity for a candidate map
    CheckDerivation(CheckDerivationArgs),
    /// Solve one pointwise witness problem
    FindWitness(FindWitnessArgs),
    /// Compute the space of degree-shift derivations on a window
    DerSpace(DerSpaceArgs),
    /// Run the reduction pipeline on a candidate map
    Decompose(DecomposeArgs),
    /// Check the central discipline of a candidate map
    CheckCenter(CheckCenterArgs),
    /// Probe a candidate map at one element
    Probe(ProbeArgs),
}

#[derive(Args)]
struct VerifyAlgebraArgs {
    /// Algebra: witt, virasoro, w22[-centerless], bms3[-centerless], or n=K[,centerless]
    #[arg(long)]
    spec: String,
    /// Degree window half-width
    #[arg(long, short = 'N', default_value_t = 3)]
    range: i64,
    /// Also check bilinearity identities on this many random element triples
    #[arg(long, default_value_t = 0)]
    random_elements: u32,
    /// Seed for the random element checks
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print a JSON report
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyConstructionArgs {
    #[arg(long)]
    spec: String,
    /// Construction name: lprime, ldoubleprime, or jprime
    #[arg(long)]
    construction: String,
    #[arg(long, short = 'N', default_value_t = 6)]
    range: i64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CheckDerivationArgs {
    /// Path to a JSON map file
    #[arg(long)]
    map: PathBuf,
    /// Expected algebra; must match the map file when given
    #[arg(long)]
    spec: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FindWitnessArgs {
    #[arg(long)]
    spec: String,
    /// Probe element literal, e.g. "L:0" or "L:2 + 3*L:0"
    #[arg(long)]
    probe: String,
    /// Target element literal
    #[arg(long)]
    target: String,
    /// Extra slack on the witness support window
    #[arg(long)]
    support_slack: Option<i64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DerSpaceArgs {
    #[arg(long)]
    spec: String,
    /// Degree shift of the derivations
    #[arg(long, default_value_t = 0)]
    degree: i64,
    #[arg(long, short = 'N', default_value_t = 6)]
    range: i64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    spec: Option<String>,
    /// Keep sweeping after the first certified rejection
    #[arg(long)]
    audit_all: bool,
    #[arg(long)]
    support_slack: Option<i64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CheckCenterArgs {
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    spec: Option<String>,
    #[arg(long)]
    support_slack: Option<i64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long)]
    map: PathBuf,
    /// Element literal to probe the candidate at
    #[arg(long)]
    probe: String,
    #[arg(long)]
    spec: Option<String>,
    #[arg(long)]
    support_slack: Option<i64>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Format(#[from] FormatError),
    #[error("{0}")]
    Algebra(#[from] AlgebraError),
    #[error("{0}")]
    Map(#[from] MapError),
    #[error("{0}")]
    Solve(#[from] SolveError),
    #[error("{0}")]
    Pipeline(#[from] PipelineError),
    #[error("--spec names {flag} but the map file carries {file}")]
    SpecMismatch { flag: String, file: String },
    #[error("unknown construction {0:?}; use lprime, ldoubleprime, or jprime")]
    BadConstruction(String),
}

fn main() -> ExitCode {
    // Die quietly when the downstream pipe closes, like any other filter.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::VerifyAlgebra(args) => verify_algebra_cmd(args),
        Command::VerifyConstruction(args) => verify_construction_cmd(args),
        Command::CheckDerivation(args) => check_derivation_cmd(args),
        Command::FindWitness(args) => find_witness_cmd(args),
        Command::DerSpace(args) => der_space_cmd(args),
        Command::Decompose(args) => decompose_cmd(args),
        Command::CheckCenter(args) => check_center_cmd(args),
        Command::Probe(args) => probe_cmd(args),
    }
}

fn load_map(path: &PathBuf, spec_flag: Option<&str>) -> Result<WindowedLinearMap, CliError> {
    let text = fs::read_to_string(path)?;
    let map = parse_map_file(&text)?;
    if let Some(flag) = spec_flag {
        let spec = parse_algebra(flag)?;
        if spec != map.spec() {
            return Err(CliError::SpecMismatch {
                flag: spec.name(),
                file: map.spec().name(),
            });
        }
    }
    Ok(map)
}

fn emit<R: Serialize>(json: bool, report: &R, text: String, code: u8) -> Result<u8, CliError> {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(report).expect("report serializes")
        );
    } else {
        print!("{text}");
    }
    Ok(code)
}

fn config_from(audit_all: bool, support_slack: Option<i64>) -> DecomposeConfig {
    DecomposeConfig {
        audit_all,
        support_slack: support_slack.unwrap_or(DEFAULT_WITNESS_SLACK),
        support_cap: DEFAULT_WITNESS_CAP,
    }
}

// ---------------------------------------------------------------- reports

#[derive(Serialize)]
struct DescriptorJson {
    inner: String,
    outer: String,
}

impl DescriptorJson {
    fn new(spec: AlgebraSpec, d: &DerivationDescriptor) -> Self {
        DescriptorJson {
            inner: render_element(spec, &d.inner),
            outer: d.outer.to_string(),
        }
    }
}

#[derive(Serialize)]
struct CertificateRowJson {
    symbol: String,
    value: String,
}

#[derive(Serialize)]
struct CertificateJson {
    support_window: i64,
    rows: Vec<CertificateRowJson>,
    verified: bool,
}

impl CertificateJson {
    fn new(spec: AlgebraSpec, rejection: &WitnessRejection) -> Self {
        let rows = rejection
            .system
            .row_symbols
            .iter()
            .zip(&rejection.certificate)
            .filter(|(_, z)| !z.is_zero())
            .map(|(sym, z)| CertificateRowJson {
                symbol: render_symbol(spec, *sym),
                value: z.to_string(),
            })
            .collect();
        CertificateJson {
            support_window: rejection.system.support_window,
            rows,
            verified: rejection.verify(),
        }
    }

    fn render_text(&self, out: &mut String) {
        let _ = writeln!(
            out,
            "certificate on {} rows (support window {}):",
            self.rows.len(),
            self.support_window
        );
        for row in &self.rows {
            let _ = writeln!(out, "  {}: {}", row.symbol, row.value);
        }
        let _ = writeln!(out, "certificate verified: {}", self.verified);
    }
}

#[derive(Serialize)]
struct ProbeJson {
    family: String,
    params: BTreeMap<String, String>,
    element: String,
}

impl ProbeJson {
    fn new(spec: AlgebraSpec, probe: &ProbeSpec) -> Self {
        ProbeJson {
            family: probe.family.to_string(),
            params: probe
                .params
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
            element: render_element(spec, &probe.element),
        }
    }

    fn render_text(&self) -> String {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{}({}) at {}", self.family, params.join(", "), self.element)
    }
}

// ------------------------------------------------------------ verify-algebra

#[derive(Serialize)]
struct VerifyAlgebraReport {
    command: &'static str,
    algebra: String,
    range: i64,
    pairs_checked: u64,
    triples_checked: u64,
    random_rounds: u32,
    seed: u64,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    violation: Option<String>,
    timing_ms: u128,
}

fn random_element(rng: &mut ChaCha8Rng, symbols: &[BasisSymbol]) -> Element {
    let mut e = Element::zero();
    for _ in 0..rng.gen_range(1..=4usize) {
        let sym = symbols[rng.gen_range(0..symbols.len())];
        let num = rng.gen_range(-9..=9i64);
        let den = rng.gen_range(1..=3i64);
        let inum = if rng.gen_bool(0.3) {
            rng.gen_range(-9..=9i64)
        } else {
            0
        };
        e.add_term(sym, QSqrt2::from_parts(num, den, inum, 1));
    }
    e
}

fn verify_algebra_cmd(args: VerifyAlgebraArgs) -> Result<u8, CliError> {
    let start = Instant::now();
    let spec = parse_algebra(&args.spec)?;
    let anti = antisymmetry_check(spec, args.range);
    let jac = jacobi_check(spec, args.range);
    let mut violation = None;
    if let Some((x, y)) = &anti.violation {
        violation = Some(format!(
            "antisymmetry fails at [{}, {}]",
            render_symbol(spec, *x),
            render_symbol(spec, *y)
        ));
    } else if let Some(v) = &jac.violation {
        violation = Some(format!(
            "jacobi residual at [{}, {}, {}]: {}",
            render_symbol(spec, v.x),
            render_symbol(spec, v.y),
            render_symbol(spec, v.z),
            render_element(spec, &v.residual)
        ));
    }
    let symbols = spec.window_symbols(args.range);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    if violation.is_none() {
        for round in 0..args.random_elements {
            let x = random_element(&mut rng, &symbols);
            let y = random_element(&mut rng, &symbols);
            let z = random_element(&mut rng, &symbols);
            let anti_sum = &bracket(spec, &x, &y)? + &bracket(spec, &y, &x)?;
            if !anti_sum.is_zero() {
                violation = Some(format!("random round {round}: antisymmetry fails"));
                break;
            }
            let jac_sum = &(&bracket(spec, &x, &bracket(spec, &y, &z)?)?
                + &bracket(spec, &y, &bracket(spec, &z, &x)?)?)
                + &bracket(spec, &z, &bracket(spec, &x, &y)?)?;
            if !jac_sum.is_zero() {
                violation = Some(format!("random round {round}: jacobi fails"));
                break;
            }
        }
    }
    let passed = violation.is_none();
    let report = VerifyAlgebraReport {
        command: "verify-algebra",
        algebra: spec.name(),
        range: args.range,
        pairs_checked: anti.pairs_checked,
        triples_checked: jac.triples_checked,
        random_rounds: args.random_elements,
        seed: args.seed,
        passed,
        violation: violation.clone(),
        timing_ms: start.elapsed().as_millis(),
    };
    let mut text = String::new();
    let _ = writeln!(text, "algebra: {}", report.algebra);
    let _ = writeln!(text, "range: [-{0}, {0}]", args.range);
    let _ = writeln!(text, "antisymmetry pairs checked: {}", report.pairs_checked);
    let _ = writeln!(text, "jacobi triples checked: {}", report.triples_checked);
    if args.random_elements > 0 {
        let _ = writeln!(
            text,
            "random element rounds: {} (seed {})",
            args.random_elements, args.seed
        );
    }
    match &violation {
        None => {
            let _ = writeln!(text, "PASS");
        }
        Some(v) => {
            let _ = writeln!(text, "FAIL: {v}");
        }
    }
    emit(args.json, &report, text, if passed { 0 } else { 1 })
}

// ------------------------------------------------------- verify-construction

#[derive(Serialize)]
struct VerifyConstructionReport {
    command: &'static str,
    algebra: String,
    construction: &'static str,
    range: i64,
    identities_checked: u64,
    violations: Vec<String>,
    passed: bool,
    timing_ms: u128,
}

fn verify_construction_cmd(args: VerifyConstructionArgs) -> Result<u8, CliError> {
    let start = Instant::now();
    let spec = parse_algebra(&args.spec)?;
    let construction: Construction = args
        .construction
        .parse()
        .map_err(|_| CliError::BadConstruction(args.construction.clone()))?;
    let result = verify_construction(spec, construction, args.range)?;
    let violations: Vec<String> = result
        .violations
        .iter()
        .map(|v| {
            format!(
                "{} at (m, n) = ({}, {}): lhs {} vs rhs {}",
                v.identity,
                v.m,
                v.n,
                render_element(spec, &v.lhs),
                render_element(spec, &v.rhs)
            )
        })
        .collect();
    let passed = violations.is_empty();
    let report = VerifyConstructionReport {
        command: "verify-construction",
        algebra: spec.name(),
        construction: construction.name(),
        range: args.range,
        identities_checked: result.identities_checked,
        violations: violations.clone(),
        passed,
        timing_ms: start.elapsed().as_millis(),
    };
    let mut text = String::new();
    let _ = writeln!(text, "algebra: {}", report.algebra);
    let _ = writeln!(text, "construction: {}", report.construction);
    let _ = writeln!(text, "identities checked: {}", report.identities_checked);
    for v in &violations {
        let _ = writeln!(text, "violation: {v}");
    }
    let _ = writeln!(text, "{}", if passed { "PASS" } else { "FAIL" });
    emit(args.json, &report, text, if passed { 0 } else { 1 })
}

// --------------------------------------------------------- check-derivation

#[derive(Serialize)]
struct CheckDerivationReport {
    command: &'static str,
    algebra: String,
    window: i64,
    pairs_checked: u64,
    pairs_skipped: u64,
    violations: Vec<String>,
    passed: bool,
    timing_ms: u128,
}

fn check_derivation_cmd(args: CheckDerivationArgs) -> Result<u8, CliError> {
    let start = Instant::now();
    let map = load_map(&args.map, args.spec.as_deref())?;
    let spec = map.spec();
    let result = map.leibniz_check();
    let violations: Vec<String> = result
        .violations
        .iter()
        .map(|v| {
            format!(
                "at ({}, {}): D[x,y] = {} but [Dx,y] + [x,Dy] = {}",
                render_symbol(spec, v.x),
                render_symbol(spec, v.y),
                render_element(spec, &v.lhs),
                render_element(spec, &v.rhs)
            )
        })
        .collect();
    let passed = violations.is_empty();
    let report = CheckDerivationReport {
        command: "check-derivation",
        algebra: spec.name(),
        window: map.window(),
        pairs_checked: result.pairs_checked,
        pairs_skipped: result.pairs_skipped,
        violations: violations.clone(),
        passed,
        timing_ms: start.elapsed().as_millis(),
    };
    let mut text = String::new();
    let _ = writeln!(text, "algebra: {}", report.algebra);
    let _ = writeln!(text, "window: [-{0}, {0}]", report.window);
    let _ = writeln!(
        text,
        "pairs checked: {} (skipped outside window: {})",
        report.pairs_checked, report.pairs_skipped
    );
    for v in &violations {
        let _ = writeln!(text, "violation {v}");
    }
    let _ = writeln!(text, "{}", if passed { "PASS" } else { "FAIL" });
    emit(args.json, &report, text, if passed { 0 } else { 1 })
}

// ------------------------------------------------------------- find-witness

#[derive(Serialize)]
struct WitnessReport {
    command: &'static str,
    algebra: String,
    probe: String,
    target: String,
    support_window: i64,
    outcome: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<DescriptorJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nullity: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateJson>,
    timing_ms: u128,
}

fn witness_report(
    command: &'static str,
    spec: AlgebraSpec,
    probe: &Element,
    target: &Element,
    support_slack: Option<i64>,
    json: bool,
    start: Instant,
) -> Result<u8, CliError> {
    let slack = support_slack.unwrap_or(DEFAULT_WITNESS_SLACK);
    let sw = default_support_window(probe, target, slack, DEFAULT_WITNESS_CAP);
    let outcome = witness_solve(spec, probe, target, Some(sw), true)?;
    let mut text = String::new();
    let _ = writeln!(text, "algebra: {}", spec.name());
    let _ = writeln!(text, "probe: {}", render_element(spec, probe));
    let _ = writeln!(text, "target: {}", render_element(spec, target));
    let _ = writeln!(text, "support window: {sw}");
    let (report, code) = match &outcome {
        WitnessOutcome::Witness { descriptor, nullity } => {
            let d = DescriptorJson::new(spec, descriptor);
            let _ = writeln!(
                text,
                "WITNESS: inner = {}, outer = {} (nullity {})",
                d.inner, d.outer, nullity
            );
            (
                WitnessReport {
                    command,
                    algebra: spec.name(),
                    probe: render_element(spec, probe),
                    target: render_element(spec, target),
                    support_window: sw,
                    outcome: "witness",
                    witness: Some(d),
                    nullity: Some(*nullity),
                    certificate: None,
                    timing_ms: start.elapsed().as_millis(),
                },
                0u8,
            )
        }
        WitnessOutcome::Infeasible(rejection) => {
            let cert = CertificateJson::new(spec, rejection);
            let _ = writeln!(text, "INFEASIBLE");
            cert.render_text(&mut text);
            (
                WitnessReport {
                    command,
                    algebra: spec.name(),
                    probe: render_element(spec, probe),
                    target: render_element(spec, target),
                    support_window: sw,
                    outcome: "infeasible",
                    witness: None,
                    nullity: None,
                    certificate: Some(cert),
                    timing_ms: start.elapsed().as_millis(),
                },
                1u8,
            )
        }
    };
    emit(json, &report, text, code)
}

fn find_witness_cmd(args: FindWitnessArgs) -> Result<u8, CliError> {
    let start = Instant::now();
    let spec = parse_algebra(&args.spec)?;
    let probe = parse_element(spec, &args.probe)?;
    let target = parse_element(spec, &args.target)?;
    witness_report(
        "find-witness",
        spec,
        &probe,
        &target,
        args.support_slack,
        args.json,
        start,
    )
}

// ------------------------------------------------------------------- probe

fn probe_cmd(args: ProbeArgs) -> Result<u8, CliError> {
    let start = Instant::now();
    let map = load_map(&args.map, args.spec.as_deref())?;
    let spec = map.spec();
    let probe = parse_element(spec, &args.probe)?;
    let target = map.apply(&probe)?;
    witness_report(
        "probe",
        spec,
        &probe,
        &target,
        args.support_slack,
        args.json,
        start,
    )
}

// ---------------------------------------------------------------- der-space

#[derive(Serialize)]
struct MapEntryJson {
    basis: String,
    value: String,
}

#[derive(Serialize)]
struct BasisMapJson {
    entries: Vec<MapEntryJson>,
}

fn map_entries_json(map: &WindowedLinearMap) -> BasisMapJson {
    let spec = map.spec();
    BasisMapJson {
        entries: map
            .nonzero_entries()
            .map(|(sym, value)| MapEntryJson {
                basis: render_symbol(spec, *sym),
                value: render_element(spec, value),
            })
            .collect(),
    }
}

#[derive(Serialize)]
struct DerSpaceReport {
    command: &'static str,
    algebra: String,
    degree: i64,
    window: i64,
    unknowns: usize,
    equations: u64,
    dimension: usize,
    basis: Vec<BasisMapJson>,
    timing_ms: u128,
}

fn der_space_cmd(args: DerSpaceArgs) -> Result<u8, CliError> {
    let start = Instant::now();
    let spec = parse_algebra(&args.spec)?;
    let space = derivation_space(spec, args.degree, args.range)?;
    let report = DerSpaceReport {
        command: "der-space",
        algebra: spec.name(),
        degree: args.degree,
        window: args.range,
        unknowns: space.unknowns,
        equations: space.equations,
        dimension: space.dimension,
        basis: space.basis.iter().map(map_entries_json).collect(),
        timing_ms: start.elapsed().as_millis(),
    };
    let mut text = String::new();
    let _ = writeln!(text, "algebra: {}", report.algebra);
    let _ = writeln!(text, "degree shift: {}", report.degree);
    let _ = writeln!(text, "window: [-{0}, {0}]", report.window);
    let _ = writeln!(
        text,
        "unknowns: {}, leibniz equations: {}",
        report.unknowns, report.equations
    );
    let _ = writeln!(text, "dimension: {}", report.dimension);
    for (i, basis_map) in report.basis.iter().enumerate() {
        let _ = writeln!(text, "basis[{i}]:");
        for entry in &basis_map.entries {
            let _ = writeln!(text, "  {} -> {}", entry.basis, entry.value);
        }
    }
    emit(args.json, &report, text, 0)
}

// ---------------------------------------------------------------- decompose

#[derive(Serialize)]
#[serde(tag = "stage")]
enum TraceJson {
    #[serde(rename = "pin-base")]
    PinBase {
        inner: String,
        outer: String,
        nullity: usize,
    },
    #[serde(rename = "pin-degree-one")]
    PinDegreeOne { corrections: Vec<MapEntryJson> },
    #[serde(rename = "outer-eigenvalue")]
    OuterEigenvalue {
        value: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        measured_at: Option<String>,
    },
    #[serde(rename = "layer-check")]
    LayerCheck { layer: u32, violations: usize },
    #[serde(rename = "central-check")]
    CentralCheck { violations: usize },
}

fn trace_json(spec: AlgebraSpec, record: &StageRecord) -> TraceJson {
    match record {
        StageRecord::PinBase { witness, nullity } => TraceJson::PinBase {
            inner: render_element(spec, &witness.inner),
            outer: witness.outer.to_string(),
            nullity: *nullity,
        },
        StageRecord::PinDegreeOne { corrections } => TraceJson::PinDegreeOne {
            corrections: corrections
                .iter()
                .map(|(layer, c)| MapEntryJson {
                    basis: render_symbol(spec, BasisSymbol::graded(*layer, 0)),
                    value: c.to_string(),
                })
                .collect(),
        },
        StageRecord::OuterEigenvalue { value, measured_at } => TraceJson::OuterEigenvalue {
            value: value.to_string(),
            measured_at: measured_at
                .map(|(layer, m)| render_symbol(spec, BasisSymbol::graded(layer, m))),
        },
        StageRecord::LayerCheck { layer, violations } => TraceJson::LayerCheck {
            layer: *layer,
            violations: *violations,
        },
        StageRecord::CentralCheck { violations } => TraceJson::CentralCheck {
            violations: *violations,
        },
    }
}

fn trace_text(t: &TraceJson) -> String {
    match t {
        TraceJson::PinBase {
            inner,
            outer,
            nullity,
        } => format!("stage pin-base: inner = {inner}, outer = {outer}, nullity {nullity}"),
        TraceJson::PinDegreeOne { corrections } => {
            let parts: Vec<String> = corrections
                .iter()
                .map(|e| format!("{} -> {}", e.basis, e.value))
                .collect();
            format!("stage pin-degree-one: {}", parts.join(", "))
        }
        TraceJson::OuterEigenvalue { value, measured_at } => match measured_at {
            Some(at) => format!("stage outer-eigenvalue: {value} (measured at {at})"),
            None => format!("stage outer-eigenvalue: {value}"),
        },
        TraceJson::LayerCheck { layer, violations } => {
            format!("stage layer-check {layer}: {violations} violations")
        }
        TraceJson::CentralCheck { violations } => {
            format!("stage central-check: {violations} violations")
        }
    }
}

#[derive(Serialize)]
struct AttemptJson {
    probe: ProbeJson,
    support_window: i64,
    outcome: &'static str,
}

#[derive(Serialize)]
struct ViolationJson {
    stage: String,
    symbol: String,
    residual: String,
    attempts: Vec<AttemptJson>,
}

#[derive(Serialize)]
struct DecomposeReport {
    command: &'static str,
    algebra: String,
    window: i64,
    outcome: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    descriptor: Option<DescriptorJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual_zero: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual_support: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    probe: Option<ProbeJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateJson>,
    trace: Vec<TraceJson>,
    violations: Vec<ViolationJson>,
    timing_ms: u128,
}

fn decompose_cmd(args: DecomposeArgs) -> Result<u8, CliError> {
    let start = Instant::now();
    let map = load_map(&args.map, args.spec.as_deref())?;
    let spec = map.spec();
    let config = config_from(args.audit_all, args.support_slack);
    let result = decompose(&map, &config)?;
    let trace: Vec<TraceJson> = result.trace.iter().map(|r| trace_json(spec, r)).collect();
    let violations: Vec<ViolationJson> = result
        .violations
        .iter()
        .map(|v| ViolationJson {
            stage: v.stage.to_string(),
            symbol: render_symbol(spec, v.symbol),
            residual: render_element(spec, &v.residual),
            attempts: v
                .attempts
                .iter()
                .map(|a| AttemptJson {
                    probe: ProbeJson::new(spec, &a.probe),
                    support_window: a.support_window,
                    outcome: if a.rejected() { "infeasible" } else { "witness" },
                })
                .collect(),
        })
        .collect();
    let mut text = String::new();
    let _ = writeln!(text, "algebra: {}", spec.name());
    let _ = writeln!(text, "window: [-{0}, {0}]", result.window);
    for t in &trace {
        let _ = writeln!(text, "{}", trace_text(t));
    }
    for v in &violations {
        let _ = writeln!(
            text,
            "violation at {} ({}): residual {}",
            v.symbol, v.stage, v.residual
        );
        for a in &v.attempts {
            let _ = writeln!(text, "  {} -> {}", a.probe.render_text(), a.outcome);
        }
    }
    let (report, code) = match &result.outcome {
        DecompositionOutcome::Decomposed {
            descriptor,
            residual_zero,
            residual_support,
        } => {
            let d = DescriptorJson::new(spec, descriptor);
            let _ = writeln!(
                text,
                "DECOMPOSED: inner = {}, outer = {}, residual zero: {}",
                d.inner, d.outer, residual_zero
            );
            if !residual_zero {
                let names: Vec<String> = residual_support
                    .iter()
                    .map(|s| render_symbol(spec, *s))
                    .collect();
                let _ = writeln!(text, "uncertified residual on: {}", names.join(", "));
            }
            (
                DecomposeReport {
                    command: "decompose",
                    algebra: spec.name(),
                    window: result.window,
                    outcome: "decomposed",
                    descriptor: Some(d),
                    residual_zero: Some(*residual_zero),
                    residual_support: Some(
                        residual_support
                            .iter()
                            .map(|s| render_symbol(spec, *s))
                            .collect(),
                    ),
                    probe: None,
                    certificate: None,
                    trace,
                    violations,
                    timing_ms: start.elapsed().as_millis(),
                },
                0u8,
            )
        }
        DecompositionOutcome::Rejected { probe, rejection } => {
            let p = ProbeJson::new(spec, probe);
            let cert = CertificateJson::new(spec, rejection);
            let _ = writeln!(text, "REJECTED by probe {}", p.render_text());
            cert.render_text(&mut text);
            (
                DecomposeReport {
                    command: "decompose",
                    algebra: spec.name(),
                    window: result.window,
                    outcome: "rejected",
                    descriptor: None,
                    residual_zero: None,
                    residual_support: None,
                    probe: Some(p),
                    certificate: Some(cert),
                    trace,
                    violations,
                    timing_ms: start.elapsed().as_millis(),
                },
                1u8,
            )
        }
    };
    emit(args.json, &report, text, code)
}

// ------------------------------------------------------------- check-center

#[derive(Serialize)]
struct CentralEntryJson {
    symbol: String,
    value: String,
    witnessed: bool,
}

#[derive(Serialize)]
struct PureCentralJson {
    symbol: String,
    value: String,
    outcome: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<DescriptorJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateJson>,
}

#[derive(Serialize)]
struct CheckCenterReport {
    command: &'static str,
    algebra: String,
    window: i64,
    central_entries: Vec<CentralEntryJson>,
    pure_central_rows: Vec<PureCentralJson>,
    passed: bool,
    timing_ms: u128,
}

fn check_center_cmd(args: CheckCenterArgs) -> Result<u8, CliError> {
    let start = Instant::now();
    let map = load_map(&args.map, args.spec.as_deref())?;
    let spec = map.spec();
    let config = config_from(false, args.support_slack);
    let result = check_center(&map, &config)?;
    let passed = result.passed();
    let central_entries: Vec<CentralEntryJson> = result
        .central_entries
        .iter()
        .map(|e| CentralEntryJson {
            symbol: render_symbol(spec, e.symbol),
            value: render_element(spec, &e.value),
            witnessed: e.witnessed,
        })
        .collect();
    let pure_central_rows: Vec<PureCentralJson> = result
        .pure_central_rows
        .iter()
        .map(|r| match &r.outcome {
            PureCentralOutcome::Rejected(rej) => PureCentralJson {
                symbol: render_symbol(spec, r.symbol),
                value: render_element(spec, &r.value),
                outcome: "rejected",
                witness: None,
                certificate: Some(CertificateJson::new(spec, rej)),
            },
            PureCentralOutcome::Witnessed(d) => PureCentralJson {
                symbol: render_symbol(spec, r.symbol),
                value: render_element(spec, &r.value),
                outcome: "witnessed",
                witness: Some(DescriptorJson::new(spec, d)),
                certificate: None,
            },
        })
        .collect();
    let report = CheckCenterReport {
        command: "check-center",
        algebra: spec.name(),
        window: map.window(),
        central_entries,
        pure_central_rows,
        passed,
        timing_ms: start.elapsed().as_millis(),
    };
    let mut text = String::new();
    let _ = writeln!(text, "algebra: {}", report.algebra);
    let _ = writeln!(text, "window: [-{0}, {0}]", report.window);
    for e in &report.central_entries {
        let _ = writeln!(
            text,
            "central symbol not annihilated: {} -> {} (pointwise witness exists: {})",
            e.symbol, e.value, e.witnessed
        );
    }
    for r in &report.pure_central_rows {
        let _ = writeln!(
            text,
            "purely central value: {} -> {} ({})",
            r.symbol, r.value, r.outcome
        );
        if let Some(cert) = &r.certificate {
            cert.render_text(&mut text);
        }
    }
    let _ = writeln!(text, "{}", if passed { "PASS" } else { "FAIL" });
    emit(args.json, &report, text, if passed { 0 } else { 1 })
}
