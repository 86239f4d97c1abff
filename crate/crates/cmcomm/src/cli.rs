//! Command-line front end: parse algebras and congruences, run the engines,
//! and emit text or JSON reports.
//!
//! Exit codes: 0 success, 1 a checked law failed (or a supplied chain failed
//! verification), 2 invalid input (parse or validation errors), 3 capacity
//! exceeded.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::algebra::FiniteAlgebra;
use crate::commutator::{higher_commutator_with, two_term_commutator_with};
use crate::congruence::{cg, congruence_lattice, is_congruence, CongruenceLattice, Partition};
use crate::cubes::{generate_matrix_algebra, DEFAULT_CAP_BITS};
use crate::dayterms::{
    find_day_chain, generator_set, verify_day_chain, DayChain, DEFAULT_CHAIN_TABLES,
};
use crate::error::{Error, Result};
use crate::theorems::{corpus, Harness};

/// Writes one line to stdout, exiting quietly if the reader has already
/// closed the pipe (`cmcomm ... | head` must not panic).
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if writeln!(std::io::stdout(), $($arg)*).is_err() {
            std::process::exit(0);
        }
    }};
}

#[derive(Parser)]
#[command(
    name = "cmcomm",
    version,
    about = "Higher commutators of congruences on finite algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the congruence lattice, one indexed partition per line
    Con(ConArgs),
    /// Higher commutator of a congruence tuple
    Comm(CommArgs),
    /// Two-term commutator of a congruence tuple
    Ttcomm(TtcommArgs),
    /// Find or verify a chain of modularity witness terms
    Dayterms(DaytermsArgs),
    /// Rotated pivot pairs of the cube algebra and the congruence they generate
    Gens(GensArgs),
    /// Sweep structural commutator laws over one algebra
    Check(CheckArgs),
    /// Cube algebra statistics for a congruence tuple
    Matrices(MatricesArgs),
}

#[derive(Args)]
struct Common {
    /// Algebra file (JSON operation tables) or built-in corpus name
    #[arg(long)]
    algebra: String,
    /// Emit machine-stable JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CongList {
    /// Congruences in block syntax "|0 2|1 3|" or as lattice indices from `con`
    #[arg(long, num_args = 1.., required = true)]
    congs: Vec<String>,
    /// Close arbitrary partitions to the congruences they generate instead of
    /// rejecting non-congruences
    #[arg(long)]
    close: bool,
}

#[derive(Args)]
struct CapArg {
    /// Packed cube word capacity in bits (default 32; env CMCOMM_CAP)
    #[arg(long)]
    cap: Option<u32>,
}

#[derive(Args)]
struct ConArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CommArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    congs: CongList,
    #[command(flatten)]
    cap: CapArg,
    /// Pivot coordinate (default: the last one, k - 1)
    #[arg(long)]
    pivot: Option<usize>,
}

#[derive(Args)]
struct TtcommArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    congs: CongList,
    #[command(flatten)]
    cap: CapArg,
}

#[derive(Args)]
struct DaytermsArgs {
    #[command(flatten)]
    common: Common,
    /// Chain file: verified when it exists, written if the search finds one
    #[arg(long)]
    chain: Option<PathBuf>,
    /// Bound on distinct term tables the search materializes
    #[arg(long, default_value_t = DEFAULT_CHAIN_TABLES)]
    tables: usize,
}

#[derive(Args)]
struct GensArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    congs: CongList,
    #[command(flatten)]
    cap: CapArg,
    /// Chain file to use instead of searching for one
    #[arg(long)]
    chain: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    common: Common,
    /// Clamp the sweep arity (default: 3 on lattices of at most five
    /// congruences, otherwise 2)
    #[arg(long)]
    k: Option<usize>,
    /// Chain file to use instead of searching for one
    #[arg(long)]
    chain: Option<PathBuf>,
}

#[derive(Args)]
struct MatricesArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    congs: CongList,
    #[command(flatten)]
    cap: CapArg,
}

/// Parses the process arguments, runs the chosen command, and returns the
/// process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {}", err);
            exit_code(&err)
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Capacity { .. } => 3,
        Error::ChainIdentity { .. } => 1,
        _ => 2,
    }
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Con(args) => con(args),
        Command::Comm(args) => comm(args),
        Command::Ttcomm(args) => ttcomm(args),
        Command::Dayterms(args) => dayterms(args),
        Command::Gens(args) => gens(args),
        Command::Check(args) => check(args),
        Command::Matrices(args) => matrices(args),
    }
}

/// Loads an algebra from a file path, falling back to the built-in corpus
/// when no such file exists but the name matches an entry.
fn load_algebra(spec: &str) -> Result<FiniteAlgebra> {
    let path = Path::new(spec);
    if path.exists() {
        return FiniteAlgebra::load(path);
    }
    if let Some(entry) = corpus().entries().iter().find(|e| e.name == spec) {
        return Ok(entry.algebra.clone());
    }
    FiniteAlgebra::load(path)
}

/// Resolves congruence arguments: decimal strings index into the lattice in
/// `con` order, anything else is block syntax.  Without `--close`, block
/// partitions must already be congruences.
fn resolve_congs(alg: &FiniteAlgebra, list: &CongList) -> Result<Vec<Partition>> {
    let mut lattice: Option<CongruenceLattice> = None;
    let mut out = Vec::with_capacity(list.congs.len());
    for spec in &list.congs {
        let trimmed = spec.trim();
        if !trimmed.is_empty() && trimmed.chars().all(|c| c.is_ascii_digit()) {
            if lattice.is_none() {
                lattice = Some(congruence_lattice(alg)?);
            }
            let lat = lattice.as_ref().expect("just built");
            let idx: usize = trimmed.parse().map_err(|_| Error::Parse {
                what: "congruence index",
                position: 0,
                message: format!("`{}` does not fit an index", trimmed),
            })?;
            if idx >= lat.len() {
                return Err(Error::Parse {
                    what: "congruence index",
                    position: 0,
                    message: format!(
                        "index {} is out of range; the lattice has {} congruences",
                        idx,
                        lat.len()
                    ),
                });
            }
            out.push(lat.get(idx).clone());
        } else {
            let p = Partition::parse(trimmed, alg.size)?;
            if list.close {
                out.push(cg(alg, &p.nontrivial_pairs())?);
            } else {
                is_congruence(alg, &p)?;
                out.push(p);
            }
        }
    }
    Ok(out)
}

fn capacity(flag: Option<u32>) -> Result<u32> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match std::env::var("CMCOMM_CAP") {
        Ok(text) => text.trim().parse().map_err(|_| Error::Parse {
            what: "capacity",
            position: 0,
            message: format!("CMCOMM_CAP must be a bit count, got `{}`", text),
        }),
        Err(_) => Ok(DEFAULT_CAP_BITS),
    }
}

fn blocks_json(p: &Partition) -> serde_json::Value {
    json!(p.blocks())
}

fn print_json(value: &serde_json::Value) {
    out!(
        "{}",
        serde_json::to_string_pretty(value).expect("reports serialize")
    );
}

fn con(args: ConArgs) -> Result<i32> {
    let alg = load_algebra(&args.common.algebra)?;
    let lattice = congruence_lattice(&alg)?;
    let modular = lattice.modularity_violation().is_none();
    if args.common.json {
        let elements: Vec<serde_json::Value> = lattice
            .elements()
            .iter()
            .enumerate()
            .map(|(i, p)| {
                json!({
                    "index": i,
                    "partition": p.to_string(),
                    "blocks": blocks_json(p),
                })
            })
            .collect();
        print_json(&json!({
            "algebra": alg.name,
            "size": alg.size,
            "congruences": elements,
            "modular": modular,
        }));
    } else {
        for (i, p) in lattice.elements().iter().enumerate() {
            out!("{}: {}", i, p);
        }
        out!("modular: {}", modular);
    }
    Ok(0)
}

fn comm(args: CommArgs) -> Result<i32> {
    let alg = load_algebra(&args.common.algebra)?;
    let congs = resolve_congs(&alg, &args.congs)?;
    let cap = capacity(args.cap.cap)?;
    let pivot = args.pivot.unwrap_or(congs.len().saturating_sub(1));
    let m = generate_matrix_algebra(&alg, &congs, cap)?;
    let result = higher_commutator_with(&alg, &m, pivot)?;
    if args.common.json {
        print_json(&json!({
            "algebra": alg.name,
            "congs": congs.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "pivot": pivot,
            "commutator": result.to_string(),
            "blocks": blocks_json(&result),
        }));
    } else {
        out!("{}", result);
    }
    Ok(0)
}

fn ttcomm(args: TtcommArgs) -> Result<i32> {
    let alg = load_algebra(&args.common.algebra)?;
    let congs = resolve_congs(&alg, &args.congs)?;
    let cap = capacity(args.cap.cap)?;
    let m = generate_matrix_algebra(&alg, &congs, cap)?;
    let result = two_term_commutator_with(&alg, &m)?;
    if args.common.json {
        print_json(&json!({
            "algebra": alg.name,
            "congs": congs.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "commutator": result.to_string(),
            "blocks": blocks_json(&result),
        }));
    } else {
        out!("{}", result);
    }
    Ok(0)
}

fn chain_strings(chain: &DayChain) -> Vec<String> {
    chain.terms().iter().map(|t| t.to_string()).collect()
}

fn dayterms(args: DaytermsArgs) -> Result<i32> {
    let alg = load_algebra(&args.common.algebra)?;
    if let Some(path) = args.chain.as_ref().filter(|p| p.exists()) {
        let chain = DayChain::load(path)?;
        verify_day_chain(&alg, &chain)?;
        if args.common.json {
            print_json(&json!({
                "algebra": alg.name,
                "mode": "verify",
                "chain": chain_strings(&chain),
                "links": chain.links(),
                "verified": true,
            }));
        } else {
            out!("verified: {} links", chain.links());
        }
        return Ok(0);
    }
    let search = find_day_chain(&alg, args.tables)?;
    if args.common.json {
        print_json(&json!({
            "algebra": alg.name,
            "mode": "search",
            "chain": search.chain.as_ref().map(chain_strings),
            "links": search.chain.as_ref().map(|c| c.links()),
            "complete": search.complete,
            "explored": search.explored,
        }));
    } else {
        match &search.chain {
            Some(chain) => {
                for (e, term) in chain.terms().iter().enumerate() {
                    out!("m{}: {}", e, term);
                }
            }
            None if search.complete => out!("none (variety not congruence modular)"),
            None => out!(
                "none found within {} tables (search truncated)",
                search.explored
            ),
        }
    }
    if let (Some(chain), Some(path)) = (&search.chain, &args.chain) {
        std::fs::write(path, chain.to_json() + "\n")?;
    }
    Ok(0)
}

/// Loads the supplied chain or searches for one; errors when the algebra has
/// none, since the rotation constructions need a chain to work with.
fn obtain_chain(alg: &FiniteAlgebra, supplied: Option<&PathBuf>) -> Result<DayChain> {
    match supplied {
        Some(path) => DayChain::load(path),
        None => find_day_chain(alg, DEFAULT_CHAIN_TABLES)?.chain.ok_or_else(|| {
            Error::contract(
                "no chain of modularity witness terms found; the construction needs one",
            )
        }),
    }
}

fn gens(args: GensArgs) -> Result<i32> {
    let alg = load_algebra(&args.common.algebra)?;
    let congs = resolve_congs(&alg, &args.congs)?;
    let cap = capacity(args.cap.cap)?;
    let prepared = obtain_chain(&alg, args.chain.as_ref())?.prepare(&alg)?;
    let m = generate_matrix_algebra(&alg, &congs, cap)?;
    let pairs = generator_set(&m, &prepared)?;
    let wide: Vec<(usize, usize)> = pairs.iter().map(|&(a, b)| (a as usize, b as usize)).collect();
    let generated = cg(&alg, &wide)?;
    let commutator = higher_commutator_with(&alg, &m, congs.len() - 1)?;
    let agreement = generated == commutator;
    if args.common.json {
        print_json(&json!({
            "algebra": alg.name,
            "congs": congs.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "pairs": pairs.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
            "cg": generated.to_string(),
            "commutator": commutator.to_string(),
            "agreement": agreement,
        }));
    } else {
        let shown: Vec<String> = pairs.iter().map(|&(a, b)| format!("({}, {})", a, b)).collect();
        out!(
            "pairs: {}",
            if shown.is_empty() { "(none)".into() } else { shown.join(" ") }
        );
        out!("cg: {}", generated);
        out!("commutator: {}", commutator);
        out!("agreement: {}", agreement);
    }
    Ok(if agreement { 0 } else { 1 })
}

fn check(args: CheckArgs) -> Result<i32> {
    let alg = load_algebra(&args.common.algebra)?;
    let mut harness = match args.chain.as_ref() {
        Some(path) => Harness::with_chain(&alg, Some(&DayChain::load(path)?))?,
        None => Harness::new(&alg)?,
    };
    if let Some(k) = args.k {
        harness.clamp_kmax(k);
    }
    let reports = harness.run_all()?;
    let failures: usize = reports.iter().map(|r| r.failures.len()).sum();
    if args.common.json {
        print_json(&serde_json::to_value(&reports)?);
    } else {
        for report in &reports {
            if !report.applicable {
                out!("{}: not applicable", report.theorem);
                continue;
            }
            out!(
                "{}: {} instances, {} failures",
                report.theorem,
                report.instances,
                report.failures.len()
            );
            for failure in &report.failures {
                out!("  {} -- {}", failure.instance, failure.detail);
            }
        }
        out!("result: {} failures", failures);
    }
    Ok(if failures == 0 { 0 } else { 1 })
}

fn matrices(args: MatricesArgs) -> Result<i32> {
    let alg = load_algebra(&args.common.algebra)?;
    let congs = resolve_congs(&alg, &args.congs)?;
    let cap = capacity(args.cap.cap)?;
    let m = generate_matrix_algebra(&alg, &congs, cap)?;
    if args.common.json {
        print_json(&json!({
            "algebra": alg.name,
            "congs": congs.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "dimension": m.k(),
            "cubes": m.len(),
            "generators": m.generator_count(),
            "saturated": m.is_saturated(),
        }));
    } else {
        out!("dimension: {}", m.k());
        out!("cubes: {}", m.len());
        out!("generators: {}", m.generator_count());
        out!("saturated: {}", m.is_saturated());
    }
    Ok(0)
}
