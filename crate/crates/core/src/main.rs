//! Command-line surface: word/block/index conversions, identity certificate
//! generation with optional numeric verification, and the self-test suites.
//!
//! Exit codes: 0 when everything passed, 1 when a verification or self-test
//! check failed, 2 on usage or evaluation errors. Default JSON output is
//! byte-identical for identical inputs; `--timings` adds wall-clock fields
//! at the cost of that reproducibility.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use zeta_blocks::eval::{parse_decimal_rational, EvalContext, Evaluator};
use zeta_blocks::formal::{build_certificate, IdentityCertificate};
use zeta_blocks::selftest::{run_suite, RunReport, Suite, SuiteOptions};
use zeta_blocks::word::{
    block_decompose, block_recompose, index_to_word, word_to_index, BinaryWord, BlockLengths,
    Index,
};
use zeta_blocks::{Error, Result};

/// Environment variable consulted for the default working precision.
const PRECISION_ENV: &str = "ZETA_BLOCKS_PRECISION";

#[derive(Parser)]
#[command(
    name = "zeta-blocks",
    version,
    about = "Block decompositions of binary words and certified multiple zeta star value identities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert between a binary word, its block lengths, and its index
    Decompose(DecomposeArgs),
    /// Generate the symmetrised identity for block lengths, optionally verifying it numerically
    Identity(IdentityArgs),
    /// Run the exact-oracle and numeric self-test suites
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Binary word over {0,1} starting with 0, e.g. 01100101010010101
    #[arg(long)]
    word: Option<String>,
    /// Index as comma-separated positive entries, e.g. 1,3,3,2
    #[arg(long)]
    index: Option<String>,
    /// Block lengths as comma-separated entries, e.g. 2,2,7,6
    #[arg(long)]
    blocks: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct IdentityArgs {
    /// Block lengths (each ≥ 2, at most 6 blocks)
    #[arg(value_name = "BLOCKS", num_args = 1.., required = true)]
    blocks: Vec<u32>,
    /// Evaluate both sides and fill the numeric record
    #[arg(long)]
    verify: bool,
    /// Working precision in bits (default 256, or $ZETA_BLOCKS_PRECISION)
    #[arg(long)]
    precision: Option<u32>,
    /// Power-series truncation order (default 256)
    #[arg(long)]
    terms: Option<u32>,
    /// Cutoff for the direct-summation oracle (default 1000000)
    #[arg(long)]
    cutoff: Option<u64>,
    /// Verification tolerance, decimal or scientific (default 1e-10)
    #[arg(long, default_value = "1e-10")]
    tolerance: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct SelftestArgs {
    /// Suite to run: words|partitions|propositions|zhao|eval|all
    #[arg(value_name = "SUITE")]
    suite: String,
    /// Exhaustive word roundtrips up to this length
    #[arg(long, default_value_t = 16)]
    max_word_len: usize,
    /// Partition oracles up to this ground-set size
    #[arg(long, default_value_t = 8)]
    max_n: usize,
    /// Proposition sweeps up to this depth
    #[arg(long, default_value_t = 3)]
    max_depth: usize,
    /// Two-one rewriting checks up to this weight
    #[arg(long, default_value_t = 8)]
    max_weight: u32,
    /// Working precision in bits (default 256, or $ZETA_BLOCKS_PRECISION)
    #[arg(long)]
    precision: Option<u32>,
    /// Power-series truncation order (default 256)
    #[arg(long)]
    terms: Option<u32>,
    /// Cutoff for the direct-summation oracle (default 1000000)
    #[arg(long)]
    cutoff: Option<u64>,
    /// Include wall-clock timing in the report (breaks byte-for-byte reproducibility)
    #[arg(long)]
    timings: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((output, code)) => {
            emit(&output);
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Writes to stdout, treating a closed pipe (e.g. `| head`) as a normal end
/// of output rather than an error.
fn emit(output: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(output.as_bytes()).and_then(|()| out.flush());
}

fn run(cli: Cli) -> Result<(String, ExitCode)> {
    match cli.command {
        Command::Decompose(args) => cmd_decompose(args),
        Command::Identity(args) => cmd_identity(args),
        Command::Selftest(args) => cmd_selftest(args),
    }
}

// ---------------------------------------------------------------------------
// decompose

#[derive(Serialize)]
struct Decomposition {
    word: String,
    blocks: BlockLengths,
    index: Option<Index>,
}

fn cmd_decompose(args: DecomposeArgs) -> Result<(String, ExitCode)> {
    let given = [&args.word, &args.index, &args.blocks]
        .iter()
        .filter(|o| o.is_some())
        .count();
    if given != 1 {
        return Err(Error::InvalidInput(
            "pass exactly one of --word, --index, --blocks".into(),
        ));
    }
    let word: BinaryWord = if let Some(w) = &args.word {
        w.parse()?
    } else if let Some(ix) = &args.index {
        index_to_word(&ix.parse::<Index>()?)
    } else {
        block_recompose(&args.blocks.as_ref().expect("checked above").parse()?)
    };
    let blocks = block_decompose(&word)?;
    let decomposition = Decomposition {
        word: word.to_string(),
        blocks,
        index: word_to_index(&word).ok(),
    };
    let output = match args.format {
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&decomposition).expect("serializable")
        ),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "word:   {}", decomposition.word);
            let _ = writeln!(s, "blocks: {}", decomposition.blocks);
            match &decomposition.index {
                Some(ix) => {
                    let _ = writeln!(s, "index:  {ix}");
                }
                None => {
                    let _ = writeln!(s, "index:  (word does not encode an index)");
                }
            }
            s
        }
    };
    Ok((output, ExitCode::SUCCESS))
}

// ---------------------------------------------------------------------------
// identity

fn cmd_identity(args: IdentityArgs) -> Result<(String, ExitCode)> {
    let lengths = BlockLengths::new(args.blocks.clone())?;
    let certificate = build_certificate(&lengths)?;
    let certificate = if args.verify {
        let ctx = context_from(args.precision, args.terms, args.cutoff)?;
        let tolerance = parse_decimal_rational(&args.tolerance)?;
        Evaluator::new(ctx).verify_certificate(&certificate, &tolerance)?
    } else {
        certificate
    };
    let pass = certificate.numeric.as_ref().map_or(true, |n| n.pass);
    let output = match args.format {
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&certificate).expect("serializable")
        ),
        Format::Text => format_certificate(&certificate),
    };
    let code = if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    };
    Ok((output, code))
}

fn format_certificate(c: &IdentityCertificate) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "blocks: {}", c.blocks);
    let _ = writeln!(s, "join:   '{}'", c.circ);
    let mut grouped: BTreeMap<&Index, usize> = BTreeMap::new();
    for ix in &c.lhs {
        *grouped.entry(ix).or_insert(0) += 1;
    }
    let lhs = grouped
        .iter()
        .map(|(ix, mult)| {
            if *mult == 1 {
                format!("zeta*{ix}")
            } else {
                format!("{mult}·zeta*{ix}")
            }
        })
        .collect::<Vec<_>>()
        .join(" + ");
    let _ = writeln!(s, "lhs:    {lhs}");
    let _ = writeln!(s, "rhs:    {}", c.rhs);
    if let Some(n) = &c.numeric {
        let _ = writeln!(s, "lhs value: {}", n.lhs);
        let _ = writeln!(s, "rhs value: {}", n.rhs);
        let _ = writeln!(s, "residual:  {}", n.residual);
        let _ = writeln!(
            s,
            "bound:     {} ({})",
            n.bound,
            if n.rigorous { "rigorous" } else { "heuristic" }
        );
        let _ = writeln!(s, "verdict:   {}", if n.pass { "PASS" } else { "FAIL" });
    }
    s
}

// ---------------------------------------------------------------------------
// selftest

fn cmd_selftest(args: SelftestArgs) -> Result<(String, ExitCode)> {
    let suite: Suite = args.suite.parse()?;
    let ctx = context_from(args.precision, args.terms, args.cutoff)?;
    let options = SuiteOptions {
        max_word_len: args.max_word_len,
        max_n: args.max_n,
        max_depth: args.max_depth,
        max_weight: args.max_weight,
        ctx: ctx.clone(),
    };
    let command = format!(
        "selftest {suite} --max-word-len {} --max-n {} --max-depth {} --max-weight {} --precision {} --terms {} --cutoff {}",
        options.max_word_len,
        options.max_n,
        options.max_depth,
        options.max_weight,
        ctx.precision_bits,
        ctx.series_terms,
        ctx.oracle_cutoff,
    );
    let started = Instant::now();
    let items = run_suite(suite, &options);
    let wall_ms = args
        .timings
        .then(|| started.elapsed().as_millis().min(u64::MAX as u128) as u64);
    let report = RunReport::assemble(command, items, wall_ms);
    let output = match args.format {
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&report).expect("serializable")
        ),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "schema:  {}", report.schema);
            let _ = writeln!(s, "command: {}", report.command);
            for item in &report.items {
                let _ = writeln!(
                    s,
                    "[{}] {} — {}",
                    if item.pass { "PASS" } else { "FAIL" },
                    item.key,
                    item.detail
                );
            }
            let _ = writeln!(s, "passed {}, failed {}", report.passed, report.failed);
            if let Some(ms) = report.wall_ms {
                let _ = writeln!(s, "wall:   {ms} ms");
            }
            s
        }
    };
    let code = if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    };
    Ok((output, code))
}

// ---------------------------------------------------------------------------
// shared plumbing

fn context_from(precision: Option<u32>, terms: Option<u32>, cutoff: Option<u64>) -> Result<EvalContext> {
    let precision = match precision {
        Some(p) => p,
        None => default_precision()?,
    };
    EvalContext::new(
        precision,
        terms.unwrap_or(EvalContext::DEFAULT_SERIES_TERMS),
        cutoff.unwrap_or(EvalContext::DEFAULT_ORACLE_CUTOFF),
    )
}

fn default_precision() -> Result<u32> {
    match std::env::var(PRECISION_ENV) {
        Ok(raw) => raw.trim().parse().map_err(|_| {
            Error::Parse(format!("{PRECISION_ENV}={raw:?} is not a bit count"))
        }),
        Err(_) => Ok(EvalContext::DEFAULT_PRECISION),
    }
}
