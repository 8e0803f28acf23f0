//! `selquant` — exact simulation and cutpoint decisions for selective
//! quantum processes, from JSON files of exact rationals.
//!
//! Exit codes: 0 = success (Accept for deciding commands), 1 = Reject,
//! 2 = any error (parse failure, invalid instance, route disagreement).

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use selquant_core::decide::{
    decide_approx, decide_process, default_scheme, derive_constants, BoundConstants,
    DecisionInstance, DecisionResult, RouteChoice, Verdict,
};
use selquant_core::frontends::{circuit_accept_probability, circuit_to_process, markov_to_process, SqrtEncoding};
use selquant_core::io;
use selquant_core::process::{build_decision_matrix, DensityMatrix, SelectiveOperation};
use selquant_core::suite;
use selquant_core::{Error, NumberField};

#[derive(Parser)]
#[command(
    name = "selquant",
    about = "Exact simulation and cutpoint decisions for selective quantum processes",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format for results
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    /// Determinant-ratio limit over the number field
    Exact,
    /// Big-integer route through a certified root approximant
    Approx,
    /// Run both and fail loudly if they disagree
    Both,
}

impl From<MethodArg> for RouteChoice {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Exact => RouteChoice::Exact,
            MethodArg::Approx => RouteChoice::Approx,
            MethodArg::Both => RouteChoice::Both,
        }
    }
}

#[derive(Args)]
struct PrecisionOverrides {
    /// Override the scaling exponent μ (runs below the certified value are
    /// marked uncertified)
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    mu: Option<u64>,
    /// Override the root-approximant precision ν (same caveat as --mu)
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    nu: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a process file: completeness, Hermitian, trace, positivity, cutpoint
    Validate {
        /// Process file (JSON)
        path: PathBuf,
    },
    /// Exact truncated halting probabilities; optionally sample a trajectory
    Simulate {
        /// Process file (JSON)
        path: PathBuf,
        /// Number of leading halting terms to sum (t = 0..=T)
        #[arg(long, default_value_t = 16)]
        truncate: u64,
        /// Sample and print one trajectory with this seed
        #[arg(long)]
        seed: Option<u64>,
        /// Also print each halting term
        #[arg(long)]
        diagnostics: bool,
    },
    /// Decide "halts with output 1 with probability > β" for a process file
    Decide {
        /// Process file (JSON); the cutpoint β is read from the file
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
        /// Print vanishing order, precision budget, and integer sizes
        #[arg(long)]
        diagnostics: bool,
    },
    /// Exact absorption probability of an absorbing chain file
    Markov {
        /// Chain file (JSON)
        path: PathBuf,
        /// Cross-check: compile to a process and sum this many halting terms
        #[arg(long)]
        truncate: Option<u64>,
    },
    /// Run only the big-integer route, with optional precision overrides
    Approx {
        /// Process file (JSON)
        path: PathBuf,
        #[command(flatten)]
        overrides: PrecisionOverrides,
        /// Print the full precision budget
        #[arg(long)]
        diagnostics: bool,
    },
    /// Print the certified precision budget for a process file
    Bounds {
        /// Process file (JSON)
        path: PathBuf,
    },
    /// Circuit-file operations
    Circuit {
        #[command(subcommand)]
        action: CircuitAction,
    },
    /// Time the decision phases on a deterministic generated suite
    Bench {
        /// Number of instances
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Suite seed
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[command(flatten)]
        overrides: PrecisionOverrides,
    },
}

#[derive(Subcommand)]
enum CircuitAction {
    /// Compile a circuit file into an equivalent process file
    Compile {
        /// Circuit file (JSON)
        path: PathBuf,
        /// Cutpoint to store in the process file (exact rational)
        #[arg(long, default_value = "0")]
        beta: String,
        /// Write the process file here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the exact acceptance probability of a circuit file
    AcceptProb {
        /// Circuit file (JSON)
        path: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

fn read(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Validate { path } => cmd_validate(&path, cli.format),
        Command::Simulate {
            path,
            truncate,
            seed,
            diagnostics,
        } => cmd_simulate(&path, truncate, seed, diagnostics, cli.format),
        Command::Decide {
            path,
            method,
            diagnostics,
        } => cmd_decide(&path, method, diagnostics, cli.format),
        Command::Markov { path, truncate } => cmd_markov(&path, truncate, cli.format),
        Command::Approx {
            path,
            overrides,
            diagnostics,
        } => cmd_approx(&path, &overrides, diagnostics, cli.format),
        Command::Bounds { path } => cmd_bounds(&path, cli.format),
        Command::Circuit { action } => match action {
            CircuitAction::Compile { path, beta, out } => cmd_compile(&path, &beta, out.as_ref()),
            CircuitAction::AcceptProb { path } => cmd_accept_prob(&path, cli.format),
        },
        Command::Bench {
            count,
            seed,
            overrides,
        } => cmd_bench(count, seed, &overrides),
    }
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

/// Parse the file structurally, then run each validity check on its own so
/// every verdict gets a line even when construction would bail at the first.
fn cmd_validate(path: &PathBuf, format: Format) -> Result<i32> {
    let v: Value = serde_json::from_str(&read(path)?).context("parsing JSON")?;
    let field = io::field_from_json(&v["field"])?;
    let dim = v["dim"]
        .as_u64()
        .context("process file needs a positive \"dim\"")? as usize;
    let outputs = v["outputs"]
        .as_u64()
        .context("process file needs a positive \"outputs\"")? as usize;

    let mut entries = Vec::new();
    let mut branches = 1usize;
    for g in v["kraus"].as_array().context("\"kraus\" must be a list")? {
        let i = g["i"].as_u64().context("kraus entry needs \"i\"")? as usize;
        let j = g["j"].as_u64().context("kraus entry needs \"j\"")? as usize;
        let m = io::complex_matrix_from_json(&field, &g["matrix"])?;
        branches = branches.max(j);
        entries.push(((i, j), m));
    }
    let rho = io::complex_matrix_from_json(&field, &v["rho"])?;
    let beta = io::element_from_json(&field, &v["beta"])?;

    let mut lines: Vec<(String, bool)> = Vec::new();
    let op = SelectiveOperation::new(&field, dim, outputs, branches, entries);
    lines.push(match &op {
        Ok(_) => ("completeness: ok".into(), true),
        Err(Error::CompletenessViolation {
            row,
            col,
            deviation,
        }) => (
            format!("completeness violation at ({row}, {col}): deviation {deviation}"),
            false,
        ),
        Err(e) => (format!("operation: {e}"), false),
    });

    let hermitian = rho.is_square() && rho.is_hermitian();
    lines.push(if hermitian {
        ("hermitian: ok".into(), true)
    } else {
        ("hermitian violation: state is not its own conjugate transpose".into(), false)
    });

    let mut trace_ok = false;
    if rho.is_square() && rho.rows() > 0 {
        let tr = rho.trace()?;
        if tr.im.is_zero() && tr.re == field.one() {
            trace_ok = true;
            lines.push(("trace: ok".into(), true));
        } else if tr.im.is_zero() {
            lines.push((format!("trace violation: trace is {}, not 1", tr.re), false));
        } else {
            lines.push(("trace violation: trace is not real".into(), false));
        }
    } else {
        lines.push(("trace: skipped (state is not square)".into(), false));
    }

    if hermitian && trace_ok {
        lines.push(match DensityMatrix::new(rho.clone()) {
            Ok(_) => ("psd: ok".into(), true),
            Err(e) => (format!("psd violation: {e}"), false),
        });
    } else {
        lines.push(("psd: skipped (needs a Hermitian unit-trace state)".into(), false));
    }

    let beta_ok = beta.sign() >= 0 && field.one().sub(&beta).sign() >= 0;
    lines.push(if beta_ok {
        ("cutpoint: ok".into(), true)
    } else {
        (format!("cutpoint violation: β = {beta} is outside [0, 1]"), false)
    });

    let all_ok = lines.iter().all(|(_, ok)| *ok);
    if format == Format::Json {
        let checks: Vec<Value> = lines
            .iter()
            .map(|(line, ok)| json!({"check": line, "ok": ok}))
            .collect();
        println!("{}", serde_json::to_string_pretty(&json!({"ok": all_ok, "checks": checks}))?);
    } else {
        for (line, _) in &lines {
            println!("{line}");
        }
        println!("{}", if all_ok { "OK" } else { "INVALID" });
    }
    Ok(if all_ok { 0 } else { 2 })
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn cmd_simulate(
    path: &PathBuf,
    truncate: u64,
    seed: Option<u64>,
    diagnostics: bool,
    format: Format,
) -> Result<i32> {
    let f = io::process_from_str(&read(path)?)?;
    let total = f.op.halting_probability_truncated(&f.rho, truncate)?;

    let mut terms = Vec::new();
    if diagnostics {
        for t in 0..=truncate {
            let mut prefix = vec![0usize; t as usize];
            prefix.push(1);
            terms.push(f.op.prefix_probability(&f.rho, &prefix)?);
        }
    }
    let trajectory = seed.map(|s| f.op.sample_trajectory(&f.rho, s, truncate as usize + 1));

    if format == Format::Json {
        let mut out = json!({
            "terms_summed": truncate + 1,
            "halting_probability_truncated": io::element_to_json(&total),
        });
        if diagnostics {
            out["terms"] = Value::Array(terms.iter().map(io::element_to_json).collect());
        }
        if let Some(t) = &trajectory {
            out["trajectory"] = json!(t);
        }
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        println!(
            "sum of the first {} halting terms: {total}",
            truncate + 1
        );
        if diagnostics {
            for (t, term) in terms.iter().enumerate() {
                println!("  term {t}: {term}");
            }
        }
        if let Some(t) = &trajectory {
            let words: Vec<String> = t.iter().map(|o| o.to_string()).collect();
            println!("sampled trajectory: {}", words.join(" "));
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// decide
// ---------------------------------------------------------------------------

fn result_json(res: &DecisionResult, diagnostics: bool) -> Value {
    let mut out = json!({
        "verdict": res.verdict.to_string(),
        "method": format!("{:?}", res.method),
    });
    if let Some(w) = &res.witness {
        out["witness"] = io::element_to_json(w);
    }
    if diagnostics {
        let d = &res.diagnostics;
        let mut diag = json!({
            "uncertified": d.uncertified,
        });
        if let Some(k) = d.vanishing_order {
            diag["vanishing_order"] = json!(k);
        }
        if let Some(r) = &d.approx_ratio {
            diag["ratio"] = json!(format!("{r}"));
        }
        if let (Some(u), Some(v)) = (d.u_bits, d.v_bits) {
            diag["u_bits"] = json!(u);
            diag["v_bits"] = json!(v);
        }
        if let Some(c) = &d.constants {
            diag["budget"] = constants_json(c);
        }
        out["diagnostics"] = diag;
    }
    out
}

fn print_result(res: &DecisionResult, diagnostics: bool, format: Format) -> Result<()> {
    if format == Format::Json {
        println!("{}", serde_json::to_string_pretty(&result_json(res, diagnostics))?);
        return Ok(());
    }
    println!("verdict: {}", res.verdict);
    if let Some(w) = &res.witness {
        println!("witness (halting probability minus cutpoint): {w}");
    }
    if diagnostics {
        let d = &res.diagnostics;
        if let Some(k) = d.vanishing_order {
            println!("vanishing order at z = 1: {k}");
        }
        if let Some(r) = &d.approx_ratio {
            println!("big-integer ratio U/V: {r}");
        }
        if let (Some(u), Some(v)) = (d.u_bits, d.v_bits) {
            println!("integer sizes: U {u} bits, V {v} bits");
        }
        if let Some(c) = &d.constants {
            print_constants(c);
        }
        if d.uncertified {
            println!("uncertified: precision overrides below the derived budget");
        }
    }
    Ok(())
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Accept => 0,
        Verdict::Reject => 1,
    }
}

fn cmd_decide(path: &PathBuf, method: MethodArg, diagnostics: bool, format: Format) -> Result<i32> {
    let f = io::process_from_str(&read(path)?)?;
    let res = decide_process(&f.op, &f.rho, &f.beta, method.into())
        .context("deciding the process")?;
    print_result(&res, diagnostics, format)?;
    Ok(verdict_code(res.verdict))
}

// ---------------------------------------------------------------------------
// markov
// ---------------------------------------------------------------------------

fn cmd_markov(path: &PathBuf, truncate: Option<u64>, format: Format) -> Result<i32> {
    let spec = io::markov_from_str(&read(path)?)?;
    let p = spec.absorption_probability()?;
    let mut crosscheck = None;
    if let Some(t) = truncate {
        let (op, rho) = markov_to_process(&spec, SqrtEncoding::FieldRootOrSplit)?;
        crosscheck = Some(op.halting_probability_truncated(&rho, t)?);
    }
    if format == Format::Json {
        let mut out = json!({"absorption_probability": io::element_to_json(&p)});
        if let Some(c) = &crosscheck {
            out["truncated_compiled_probability"] = io::element_to_json(c);
        }
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        println!("absorption probability: {p}");
        if let Some(c) = &crosscheck {
            println!("compiled-process truncation: {c}");
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// approx / bounds
// ---------------------------------------------------------------------------

fn constants_json(c: &BoundConstants) -> Value {
    json!({
        "degree_in_generator": c.n_deg,
        "degree_in_z": c.n_deg_z,
        "coefficient_height": c.n_height.to_string(),
        "taylor_height": c.coeff_height.to_string(),
        "value_bound": c.value_bound.to_string(),
        "separation_floor": c.mahler_floor.to_string(),
        "c1": c.c1_exponent,
        "separation": c.separation.to_string(),
        "mu": c.mu,
        "nu": c.nu,
        "clearing_denominator": c.clearing_denominator.to_string(),
    })
}

fn print_constants(c: &BoundConstants) {
    println!("precision budget:");
    println!("  degree in the generator: {}", c.n_deg);
    println!("  degree in z: {}", c.n_deg_z);
    println!("  coefficient height: {} ({} bits)", c.n_height, c.n_height.bits());
    println!("  value bound: {}", c.value_bound);
    println!("  separation floor: {}", c.mahler_floor);
    println!("  threshold exponent c1: {}", c.c1_exponent);
    println!("  separation: {}", c.separation);
    println!("  scaling exponent mu: {}", c.mu);
    println!("  approximant precision nu: {}", c.nu);
    println!("  clearing denominator: {}", c.clearing_denominator);
}

fn instance_of(f: &io::ProcessFile) -> Result<DecisionInstance> {
    let dm = build_decision_matrix(&f.op, &f.rho, &f.beta)?;
    Ok(DecisionInstance::from_decision_matrix(&dm))
}

/// An instance whose operation or state carries complex entries must be
/// realified before the determinant pipelines see it.
fn realified_instance(f: &io::ProcessFile) -> Result<DecisionInstance> {
    if f.op.is_real() && f.rho.is_real() {
        return instance_of(f);
    }
    let (op, rho) = f.op.realify(&f.rho)?;
    let dm = build_decision_matrix(&op, &rho, &f.beta)?;
    Ok(DecisionInstance::from_decision_matrix(&dm))
}

fn cmd_approx(
    path: &PathBuf,
    overrides: &PrecisionOverrides,
    diagnostics: bool,
    format: Format,
) -> Result<i32> {
    let f = io::process_from_str(&read(path)?)?;
    let inst = realified_instance(&f)?;
    let certified = derive_constants(&inst)?;
    let mut constants = certified.clone();
    if let Some(mu) = overrides.mu {
        constants.mu = mu;
    }
    if let Some(nu) = overrides.nu {
        constants.nu = nu;
    }
    let uncertified = constants.mu < certified.mu || constants.nu < certified.nu;

    let scheme = default_scheme(inst.field())?;
    let mut res = decide_approx(&inst, &scheme, &constants).context("big-integer route")?;
    res.diagnostics.uncertified = uncertified;
    print_result(&res, diagnostics, format)?;
    Ok(verdict_code(res.verdict))
}

fn cmd_bounds(path: &PathBuf, format: Format) -> Result<i32> {
    let f = io::process_from_str(&read(path)?)?;
    let inst = realified_instance(&f)?;
    let c = derive_constants(&inst)?;
    if format == Format::Json {
        println!("{}", serde_json::to_string_pretty(&constants_json(&c))?);
    } else {
        println!("instance dimension: {}", inst.dim());
        print_constants(&c);
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// circuit
// ---------------------------------------------------------------------------

fn cmd_compile(path: &PathBuf, beta: &str, out: Option<&PathBuf>) -> Result<i32> {
    let circuit = io::circuit_from_str(&read(path)?)?;
    let (op, rho) = circuit_to_process(&circuit)?;
    let beta = op.field().from_rational(io::parse_rational(beta)?);
    let v = io::process_to_json(&op, &rho, &beta);
    let text = serde_json::to_string_pretty(&v)?;
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => println!("{text}"),
    }
    Ok(0)
}

fn cmd_accept_prob(path: &PathBuf, format: Format) -> Result<i32> {
    let circuit = io::circuit_from_str(&read(path)?)?;
    let p = circuit_accept_probability(&circuit)?;
    if format == Format::Json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({"accept_probability": io::element_to_json(&p)}))?
        );
    } else {
        println!("acceptance probability: {p}");
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

/// Deterministic generated instances; per-phase wall times plus the integer
/// sizes the big-integer route produced. Non-timing columns depend only on
/// `--count`, `--seed`, and the overrides.
fn cmd_bench(count: usize, seed: u64, overrides: &PrecisionOverrides) -> Result<i32> {
    let field = NumberField::sqrt2();
    let instances = suite::real_suite(&field, count, seed)?;
    let betas = suite::beta_values(&field);
    println!(
        "{:<14} {:>3} {:>6} {:>8} {:>12} {:>12} {:>12} {:>10} {:>10}",
        "instance", "p", "mu", "nu", "constants_ms", "newton_ms", "route_ms", "u_bits", "v_bits"
    );
    for (k, inst) in instances.iter().enumerate() {
        let beta = &betas[k % betas.len()];
        let dm = build_decision_matrix(&inst.op, &inst.rho, beta)?;
        let di = DecisionInstance::from_decision_matrix(&dm);

        let t0 = Instant::now();
        let certified = derive_constants(&di)?;
        let constants_ms = t0.elapsed().as_millis();

        let mut constants = certified.clone();
        if let Some(mu) = overrides.mu {
            constants.mu = mu;
        }
        if let Some(nu) = overrides.nu {
            constants.nu = nu;
        }

        let t1 = Instant::now();
        let scheme = default_scheme(di.field())?;
        let _ = scheme.approximant(constants.nu);
        let newton_ms = t1.elapsed().as_millis();

        let t2 = Instant::now();
        let row = match decide_approx(&di, &scheme, &constants) {
            Ok(res) => {
                let route_ms = t2.elapsed().as_millis();
                format!(
                    "{:<14} {:>3} {:>6} {:>8} {:>12} {:>12} {:>12} {:>10} {:>10}",
                    format!("suite[{k}]"),
                    di.dim(),
                    constants.mu,
                    constants.nu,
                    constants_ms,
                    newton_ms,
                    route_ms,
                    res.diagnostics.u_bits.unwrap_or(0),
                    res.diagnostics.v_bits.unwrap_or(0),
                )
            }
            Err(e) => format!("suite[{k}]: route failed under overrides: {e}"),
        };
        println!("{row}");
    }
    Ok(0)
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn verdicts_map_to_the_documented_exit_codes() {
        assert_eq!(verdict_code(Verdict::Accept), 0);
        assert_eq!(verdict_code(Verdict::Reject), 1);
    }

    #[test]
    fn method_flag_maps_onto_route_choices() {
        assert!(matches!(RouteChoice::from(MethodArg::Exact), RouteChoice::Exact));
        assert!(matches!(RouteChoice::from(MethodArg::Approx), RouteChoice::Approx));
        assert!(matches!(RouteChoice::from(MethodArg::Both), RouteChoice::Both));
    }
}
