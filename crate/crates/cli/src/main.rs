use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use anyhow::anyhow;
use clap::{Parser, Subcommand, ValueEnum};
use noncross::io::{self, StructureJson};
use noncross::report::{digest, RunReport};
use noncross::suites::{self, Params};
use noncross::{oracle, svg};
use noncross_core::constructions::{
    construct, construct_cycle_even, construct_cycle_odd, construct_matching, construct_path_even, construct_path_odd,
    ConstructionError,
};
use noncross_core::exactnum::{Interval, PrecisionPolicy, Rat};
use noncross_core::geometry::{is_noncrossing, PointSet, Structure, StructureKind};
use noncross_core::line1d::{
    cycle_deficit_lemma_check, edges_over_gap, is_longest_cycle_1d, is_longest_path_1d, is_longest_path_1d_odd,
    longest_cycle_length_1d, longest_path_length_1d, LineSet,
};
use noncross_core::maxsolvers::{max_structure, Method, SolveError, SolveOptions, Uniqueness};
use serde_json::json;

/// Largest value set `characterize-1d` enumerates exhaustively.
const ENUMERATION_CAP: usize = 9;

#[derive(Parser)]
#[command(name = "noncross", version, about = "Exact longest noncrossing paths, cycles and matchings")]
struct Cli {
    /// Width target, in bits, for reported length enclosures.
    #[arg(long, global = true, default_value_t = 256)]
    precision_bits: u32,
    /// Solver: auto, brute or dp.
    #[arg(long, global = true, default_value = "auto")]
    method: String,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory for `construct`, SVG path for `render`, report
    /// path for the other commands.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Largest precision, in bits, that exact comparisons escalate to.
    #[arg(long, global = true, env = "NONCROSS_PRECISION_CAP")]
    precision_cap: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructKind {
    PathEven,
    PathOdd,
    CycleEven,
    CycleOdd,
    Matching,
    Path,
    Cycle,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Path,
    Cycle,
    Matching,
}

impl From<KindArg> for StructureKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Path => StructureKind::Path,
            KindArg::Cycle => StructureKind::Cycle,
            KindArg::Matching => StructureKind::Matching,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a point set whose longest structure is unique and noncrossing.
    Construct {
        kind: ConstructKind,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Solve a point set exactly and report the optimum.
    Verify {
        points: PathBuf,
        #[arg(long)]
        kind: KindArg,
        /// Structure or certificate file the optimum must equal.
        #[arg(long)]
        expect: Option<PathBuf>,
    },
    /// Longest paths or cycles on values of a line.
    #[command(name = "characterize-1d")]
    Characterize1d {
        values: PathBuf,
        #[arg(long)]
        kind: KindArg,
    },
    /// Draw a point set and optionally a structure as SVG.
    Render {
        points: PathBuf,
        /// Structure or certificate file.
        #[arg(long)]
        structure: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        y_scale: f64,
    },
    /// Run a property suite: all, line1d, constructions, properties or
    /// acceptance.
    Suite {
        name: String,
        /// Random instances per battery.
        #[arg(long)]
        seeds: Option<usize>,
    },
}

enum Failure {
    Usage(String),
    Failed(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Failed(format!("{e:#}"))
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Capacity { .. }
            | SolveError::TooFew { .. }
            | SolveError::OddMatching { .. }
            | SolveError::UnknownMethod(_) => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<i32, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Construct { kind, k, n } => cmd_construct(&cli, *kind, *k, *n),
        Command::Verify { points, kind, expect } => cmd_verify(&cli, points, (*kind).into(), expect.as_deref()),
        Command::Characterize1d { values, kind } => cmd_characterize(&cli, values, (*kind).into()),
        Command::Render { points, structure, y_scale } => cmd_render(&cli, points, structure.as_deref(), *y_scale),
        Command::Suite { name, seeds } => cmd_suite(&cli, name, *seeds),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn solve_options(cli: &Cli) -> Result<SolveOptions, Failure> {
    let method = Method::from_str(&cli.method)?;
    let mut opts = SolveOptions { precision_bits: cli.precision_bits, ..SolveOptions::default() }.with_method(method);
    if let Some(cap) = cli.precision_cap {
        opts.policy = PrecisionPolicy::with_cap(cap);
    }
    Ok(opts)
}

fn command_echo() -> Vec<String> {
    std::env::args().collect()
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Failed(format!("reading {}: {e}", path.display())))
}

fn finish_report(cli: &Cli, inputs: &[Vec<u8>], results: serde_json::Value, failures: Vec<String>) -> Outcome {
    let exit_status = if failures.is_empty() { 0 } else { 1 };
    for f in &failures {
        eprintln!("failure: {f}");
    }
    let report = RunReport { command: command_echo(), inputs_digest: digest(inputs), results, failures, exit_status };
    if let Some(out) = &cli.out {
        io::write_json(out, &report)?;
    }
    Ok(exit_status)
}

fn interval_json(iv: &Interval) -> serde_json::Value {
    json!({ "lo": iv.lo.to_string(), "hi": iv.hi.to_string(), "approx": iv.midpoint().to_f64() })
}

fn cmd_construct(cli: &Cli, kind: ConstructKind, k: Option<u32>, n: Option<usize>) -> Outcome {
    let need_k = |k: Option<u32>| k.ok_or_else(|| Failure::Usage("this kind takes --k".into()));
    let need_n = |n: Option<usize>| n.ok_or_else(|| Failure::Usage("this kind takes --n".into()));
    let (uses_k, uses_n) = match kind {
        ConstructKind::CycleEven | ConstructKind::Path | ConstructKind::Cycle => (false, true),
        _ => (true, false),
    };
    if (!uses_k && k.is_some()) || (!uses_n && n.is_some()) {
        return Err(Failure::Usage("pass --k for path-even, path-odd, cycle-odd and matching, --n otherwise".into()));
    }
    let built = match kind {
        ConstructKind::PathEven => construct_path_even(need_k(k)?),
        ConstructKind::PathOdd => construct_path_odd(need_k(k)?),
        ConstructKind::CycleOdd => construct_cycle_odd(need_k(k)?),
        ConstructKind::Matching => construct_matching(need_k(k)?),
        ConstructKind::CycleEven => construct_cycle_even(need_n(n)?),
        ConstructKind::Path => construct(StructureKind::Path, need_n(n)?),
        ConstructKind::Cycle => construct(StructureKind::Cycle, need_n(n)?),
    };
    let (ps, cert) = built.map_err(|e| match e {
        ConstructionError::InvalidParameter(_) => Failure::Usage(e.to_string()),
        other => Failure::Failed(format!("construction failed: {other}")),
    })?;

    println!("construction {} with {} points", cert.kind, ps.len());
    if let Some(eps) = &cert.epsilon {
        println!("epsilon ~ {}", eps.to_scientific(6));
    }
    for s in &cert.steps {
        println!(
            "  {:<8} y ~ {:<14} delta ~ {:<14} {}",
            s.label,
            s.y.to_scientific(6),
            s.delta.to_scientific(6),
            s.provenance
        );
    }
    println!("claimed optimum: {}", ps.labels_of(&cert.claimed_optimum).join(" "));
    if let Some(note) = &cert.note {
        println!("note: {note}");
    }

    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    io::write_json(&dir.join("points.json"), &io::point_set_to_json(&ps))?;
    io::write_json(&dir.join("certificate.json"), &io::certificate_to_json(&ps, &cert))?;
    io::write_json(&dir.join("structure.json"), &io::structure_to_json(&ps, &cert.claimed_optimum))?;
    println!("wrote points.json, certificate.json and structure.json to {}", dir.display());
    Ok(0)
}

fn uniqueness_name(u: &Uniqueness) -> &'static str {
    match u {
        Uniqueness::Proven => "proven",
        Uniqueness::Refuted(_) => "refuted",
        Uniqueness::Unresolved => "unresolved",
    }
}

fn cmd_verify(cli: &Cli, points: &Path, kind: StructureKind, expect: Option<&Path>) -> Outcome {
    let opts = solve_options(cli)?;
    let mut inputs = vec![read_bytes(points)?];
    let ps = io::read_point_set(points)?;
    let expected = match expect {
        Some(path) => {
            inputs.push(read_bytes(path)?);
            let s = io::read_expected(path, &ps)?;
            if s.kind() != kind {
                return Err(Failure::Usage(format!("expected structure is a {}, not a {kind}", s.kind())));
            }
            Some(s)
        }
        None => None,
    };

    let start = Instant::now();
    let mut res = max_structure(&ps, kind, &opts)?;
    res.stats.wall_time = Some(start.elapsed());

    let noncrossing = is_noncrossing(&res.best, &ps);
    let mut failures = Vec::new();
    if res.unique == Uniqueness::Unresolved {
        failures.push("uniqueness could not be decided at the precision cap".to_string());
    }
    let co_optima: Vec<StructureJson> = match &res.unique {
        Uniqueness::Refuted(all) => all.iter().map(|s| io::structure_to_json(&ps, s)).collect(),
        _ => Vec::new(),
    };
    let mut matches_expected = None;
    if let Some(exp) = &expected {
        let same = exp.canonical() == res.best;
        matches_expected = Some(same && res.unique.is_proven());
        if !same {
            failures.push(format!("optimum {} differs from the expected structure", ps.labels_of(&res.best).join(" ")));
        } else if let Uniqueness::Refuted(all) = &res.unique {
            failures.push(format!("the expected structure is one of {} optima", all.len()));
        }
    }

    println!("{kind} on {} points, method {}", ps.len(), res.method);
    println!("optimum: {}", ps.labels_of(&res.best).join(" "));
    println!("length ~ {}", res.best_length.midpoint().to_f64());
    println!("uniqueness: {}", uniqueness_name(&res.unique));
    println!("noncrossing: {noncrossing}");
    if let Some(m) = matches_expected {
        println!("matches expected: {m}");
    }

    let results = json!({
        "kind": kind.to_string(),
        "n": ps.len(),
        "method": res.method.to_string(),
        "best": io::structure_to_json(&ps, &res.best),
        "best_length": interval_json(&res.best_length),
        "second_best_length": res.second_best_length.as_ref().map(interval_json),
        "uniqueness": uniqueness_name(&res.unique),
        "co_optima": co_optima,
        "noncrossing": noncrossing,
        "matches_expected": matches_expected,
        "stats": {
            "examined": res.stats.examined,
            "peak_table": res.stats.peak_table,
            "candidates": res.stats.candidates,
            "truncated": res.stats.truncated,
            "wall_time_seconds": res.stats.wall_time.map(|d| d.as_secs_f64()),
        },
    });
    finish_report(cli, &inputs, results, failures)
}

fn cmd_characterize(cli: &Cli, values: &Path, kind: StructureKind) -> Outcome {
    let inputs = vec![read_bytes(values)?];
    let vals = io::read_values(values)?;
    let ls = LineSet::new(vals).map_err(|e| Failure::Usage(e.to_string()))?;
    let n = ls.len();
    let mut failures = Vec::new();
    let closed = match kind {
        StructureKind::Path if n % 2 == 0 => longest_path_length_1d(&ls).ok(),
        StructureKind::Path => None,
        StructureKind::Cycle => Some(longest_cycle_length_1d(&ls).map_err(|e| Failure::Usage(e.to_string()))?),
        StructureKind::Matching => return Err(Failure::Usage("characterize-1d handles paths and cycles".into())),
    };
    if kind == StructureKind::Path && n < 2 {
        return Err(Failure::Usage(format!("{n} values, need at least 2")));
    }
    println!("values: {}", ls.values().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "));
    println!("median: {}", ls.median());
    match &closed {
        Some(v) => println!("closed-form optimum: {v}"),
        None => println!("closed-form optimum: none for an odd count"),
    }
    let mut results = json!({
        "kind": kind.to_string(),
        "values": ls.values().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "median": ls.median().to_string(),
        "closed_form": closed.as_ref().map(|v| v.to_string()),
    });

    if n > ENUMERATION_CAP {
        println!("more than {ENUMERATION_CAP} values: optima not enumerated");
        return finish_report(cli, &inputs, results, failures);
    }
    let all = if kind == StructureKind::Path { oracle::all_paths(n) } else { oracle::all_cycles(n) };
    let lens: Vec<Rat> = all.iter().map(|s| ls.length(s)).collect();
    let best = lens.iter().max().expect("at least one structure").clone();
    if let Some(c) = &closed {
        if *c != best {
            failures.push(format!("closed form {c} differs from the enumerated optimum {best}"));
        }
    }
    let verdict = |s: &Structure| match kind {
        StructureKind::Path if n % 2 == 0 => is_longest_path_1d(s, &ls),
        StructureKind::Path => is_longest_path_1d_odd(s, &ls),
        _ => is_longest_cycle_1d(s, &ls),
    };
    let show = |s: &Structure| {
        s.order().expect("path or cycle").iter().map(|&i| ls.values()[i].to_string()).collect::<Vec<_>>()
    };
    println!("enumerated optimum: {best}");
    let mut optima = Vec::new();
    for (s, len) in all.iter().zip(&lens) {
        let v = verdict(s).unwrap_or(false);
        if *len == best {
            println!("  optimum {}  characterization: {}", show(s).join(" "), if v { "yes" } else { "no" });
            optima.push(json!({ "order": show(s), "characterized": v }));
        }
        if v != (*len == best) {
            failures.push(format!("characterization verdict {v} on {:?} with length {len}", show(s)));
        }
    }
    results["enumerated_optimum"] = json!(best.to_string());
    results["optima"] = json!(optima);

    if kind == StructureKind::Cycle && n % 2 == 1 {
        let k = n / 2;
        let two_h = (&ls.values()[k + 1] - &ls.values()[k]) * Rat::from_int(2);
        let mut short = 0usize;
        let mut least_loss: Option<Rat> = None;
        for (s, len) in all.iter().zip(&lens) {
            if edges_over_gap(s, k) < 2 * k {
                short += 1;
                let loss = &best - len;
                let bound = cycle_deficit_lemma_check(&ls, s).map_err(|e| anyhow!("{e}"))?;
                if loss < bound {
                    failures.push(format!("cycle {:?} is only {loss} shorter, bound {bound}", show(s)));
                }
                least_loss = Some(least_loss.map_or(loss.clone(), |m| m.min(loss)));
            }
        }
        println!(
            "deficit: {short} cycles cross the gap right of the median fewer than {} times; smallest loss {}, required {two_h}",
            2 * k,
            least_loss.as_ref().map_or("none".to_string(), |v| v.to_string())
        );
        results["deficit"] = json!({
            "gap_index": k,
            "required": two_h.to_string(),
            "short_cycles": short,
            "smallest_loss": least_loss.map(|v| v.to_string()),
        });
    }
    finish_report(cli, &inputs, results, failures)
}

fn cmd_render(cli: &Cli, points: &Path, structure: Option<&Path>, y_scale: f64) -> Outcome {
    if !(y_scale.is_finite() && y_scale > 0.0) {
        return Err(Failure::Usage("--y-scale must be positive".into()));
    }
    let ps: PointSet = io::read_point_set(points)?;
    let s = structure.map(|p| io::read_expected(p, &ps)).transpose()?;
    let text = svg::render(&ps, s.as_ref(), y_scale);
    match &cli.out {
        Some(out) => {
            io::write_atomic(out, text.as_bytes())?;
            println!("wrote {}", out.display());
        }
        None => print!("{text}"),
    }
    Ok(0)
}

fn cmd_suite(cli: &Cli, name: &str, seeds: Option<usize>) -> Outcome {
    let checks = suites::suite(name).ok_or_else(|| {
        Failure::Usage(format!("unknown suite {name:?}; expected one of {}", suites::SUITES.join(", ")))
    })?;
    let mut params = Params { seed: cli.seed, ..Params::default() };
    if let Some(n) = seeds {
        params = params.with_seeds(n);
    }
    let results = suites::run(&checks, &params);
    let mut failures = Vec::new();
    for c in &results {
        println!("{}", c.line());
        failures.extend(c.failures.iter().map(|f| format!("{}: {f}", c.name)));
    }
    let passed = results.iter().filter(|c| c.passed).count();
    println!("{passed}/{} checks passed", results.len());
    let tally = json!({ "suite": name, "seed": cli.seed, "passed": passed, "total": results.len(), "checks": results });
    finish_report(cli, &[], tally, failures)
}
