//! Self-test suites: exact enumeration oracles and numeric cross-checks
//! packaged as machine-readable reports.
//!
//! Each suite runs a family of checks and returns one [`ReportItem`] per
//! check, aggregated where a check covers an exhaustive sweep. Failures are
//! report content, not errors: anything that goes wrong (including internal
//! evaluation errors) lands in a failing item. Items are sorted by key so
//! identical inputs produce byte-identical reports; wall time is recorded
//! only on request for the same reason.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::eval::{dp_oracle, EvalContext, EvalResult, Evaluator};
use crate::formal::{
    build_certificate, verify_oddpart_proposition, verify_sn_proposition, zhao_star_expansion,
};
use crate::partitions::{
    coefficient_c, enumerate_set_partitions, g_bruteforce, g_poly, ordered_ordered_count,
};
use crate::real::Real;
use crate::signed_index::{SignedIndex, SignedInteger};
use crate::word::{
    block_decompose, block_recompose, index_to_word, word_to_index, BinaryWord, BlockLengths,
    Index,
};
use crate::{Error, Result};

/// Report schema identifier, bumped on breaking layout changes.
pub const REPORT_SCHEMA: &str = "zeta-blocks/1";

/// The available self-test suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Words,
    Partitions,
    Propositions,
    Zhao,
    Eval,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "words" => Ok(Suite::Words),
            "partitions" => Ok(Suite::Partitions),
            "propositions" => Ok(Suite::Propositions),
            "zhao" => Ok(Suite::Zhao),
            "eval" => Ok(Suite::Eval),
            "all" => Ok(Suite::All),
            other => Err(Error::Parse(format!(
                "unknown suite {other:?}; expected words|partitions|propositions|zhao|eval|all"
            ))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Words => "words",
            Suite::Partitions => "partitions",
            Suite::Propositions => "propositions",
            Suite::Zhao => "zhao",
            Suite::Eval => "eval",
            Suite::All => "all",
        })
    }
}

/// Budget knobs for the suites; the defaults match the documented desk-scale
/// sweeps.
#[derive(Debug, Clone)]
pub struct SuiteOptions {
    /// Exhaustive word roundtrips up to this length.
    pub max_word_len: usize,
    /// Partition oracles up to this ground-set size (coefficient sweep is
    /// capped two lower internally to stay fast).
    pub max_n: usize,
    /// Proposition checks exhaust all signed tuples up to this depth.
    pub max_depth: usize,
    /// Two-one rewriting verified numerically up to this weight.
    pub max_weight: u32,
    /// Numeric context for the zhao and eval suites.
    pub ctx: EvalContext,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            max_word_len: 16,
            max_n: 8,
            max_depth: 3,
            max_weight: 8,
            ctx: EvalContext::default(),
        }
    }
}

/// One check in a report.
#[derive(Debug, Clone, Serialize)]
pub struct ReportItem {
    pub key: String,
    pub pass: bool,
    pub detail: String,
}

/// A full self-test (or verification) run: command echo, ordered items,
/// summary counts. `wall_ms` is omitted unless timings were requested, so
/// default reports are byte-identical across runs.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub command: String,
    pub items: Vec<ReportItem>,
    pub passed: usize,
    pub failed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

impl RunReport {
    /// Sorts items by key and fills the summary counts.
    pub fn assemble(command: String, mut items: Vec<ReportItem>, wall_ms: Option<u64>) -> Self {
        items.sort_by(|a, b| a.key.cmp(&b.key));
        let passed = items.iter().filter(|i| i.pass).count();
        let failed = items.len() - passed;
        RunReport {
            schema: REPORT_SCHEMA,
            command,
            items,
            passed,
            failed,
            wall_ms,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }
}

/// Runs one suite and returns its (unsorted) items.
pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Vec<ReportItem> {
    match suite {
        Suite::Words => words_suite(opts),
        Suite::Partitions => partitions_suite(opts),
        Suite::Propositions => propositions_suite(opts),
        Suite::Zhao => zhao_suite(opts),
        Suite::Eval => eval_suite(opts),
        Suite::All => {
            let mut items = words_suite(opts);
            items.extend(partitions_suite(opts));
            items.extend(propositions_suite(opts));
            items.extend(zhao_suite(opts));
            items.extend(eval_suite(opts));
            items
        }
    }
}

fn item(key: impl Into<String>, outcome: Result<(bool, String)>) -> ReportItem {
    let key = key.into();
    match outcome {
        Ok((pass, detail)) => ReportItem { key, pass, detail },
        Err(e) => ReportItem {
            key,
            pass: false,
            detail: format!("error: {e}"),
        },
    }
}

// ---------------------------------------------------------------------------
// words

fn words_suite(opts: &SuiteOptions) -> Vec<ReportItem> {
    vec![
        item("words/roundtrip-exhaustive", exhaustive_word_roundtrip(opts.max_word_len)),
        item("words/blocks-2-2-7-6", worked_example_roundtrip()),
        item("words/index-word-roundtrip", index_word_roundtrip()),
    ]
}

fn exhaustive_word_roundtrip(max_len: usize) -> Result<(bool, String)> {
    let mut count = 0u64;
    for len in 1..=max_len {
        for mask in 0u64..(1 << (len - 1)) {
            let mut bits = Vec::with_capacity(len);
            bits.push(false);
            for j in 0..len - 1 {
                bits.push((mask >> j) & 1 == 1);
            }
            let w = BinaryWord::new(bits)?;
            let blocks = block_decompose(&w)?;
            let back = block_recompose(&blocks);
            if back != w {
                return Ok((false, format!("roundtrip failed at {w}")));
            }
            count += 1;
        }
    }
    Ok((true, format!("{count} words of length ≤ {max_len} round-trip")))
}

fn worked_example_roundtrip() -> Result<(bool, String)> {
    let w: BinaryWord = "01100101010010101".parse()?;
    let blocks = block_decompose(&w)?;
    let expected = BlockLengths::new(vec![2, 2, 7, 6])?;
    if blocks != expected {
        return Ok((false, format!("got {blocks}, want {expected}")));
    }
    let back = block_recompose(&blocks);
    if back.to_string() != "01100101010010101" {
        return Ok((false, format!("recompose produced {back}")));
    }
    Ok((true, "decomposes to (2,2,7,6) and back".into()))
}

fn index_word_roundtrip() -> Result<(bool, String)> {
    let mut count = 0u64;
    for ix in convergent_indices(10) {
        let w = index_to_word(&ix);
        let back = word_to_index(&w)?;
        if back != ix {
            return Ok((false, format!("index {ix} came back as {back}")));
        }
        count += 1;
    }
    Ok((true, format!("{count} indices of weight ≤ 10 round-trip")))
}

/// Convergent indices with entries in {1,2,3} and weight ≤ `max_weight`.
fn convergent_indices(max_weight: u32) -> Vec<Index> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<u32>> = vec![vec![]];
    while let Some(prefix) = stack.pop() {
        let weight: u32 = prefix.iter().sum();
        for e in 1..=3u32 {
            if weight + e > max_weight {
                continue;
            }
            let mut next = prefix.clone();
            next.push(e);
            if e >= 2 {
                out.push(Index::new(next.clone()).expect("positive entries"));
            }
            stack.push(next);
        }
    }
    out.sort();
    out
}

// ---------------------------------------------------------------------------
// partitions

fn partitions_suite(opts: &SuiteOptions) -> Vec<ReportItem> {
    let n = opts.max_n.min(8);
    vec![
        item("partitions/bell-counts", bell_counts(n)),
        item("partitions/g-closed-form", g_closed_form(n)),
        item("partitions/g-polynomial", g_polynomial(n)),
        item("partitions/ordered-count", ordered_count(n.min(7))),
        item("partitions/c-closed-form", c_closed_form(n.saturating_sub(2).max(4))),
    ]
}

fn bell_counts(max_n: usize) -> Result<(bool, String)> {
    let bell = [1usize, 1, 2, 5, 15, 52, 203, 877, 4140];
    for n in 1..=max_n.min(8) {
        let got = enumerate_set_partitions(n)?.len();
        if got != bell[n] {
            return Ok((false, format!("{got} partitions of an {n}-set, want {}", bell[n])));
        }
    }
    Ok((true, format!("partition counts match through n = {}", max_n.min(8))))
}

fn g_closed_form(max_n: usize) -> Result<(bool, String)> {
    for n in 1..=max_n {
        let got = g_bruteforce(n)?;
        let want = if n % 2 == 1 {
            -BigRational::from_integer(factorial_int(n - 1) * BigInt::from(2))
        } else {
            BigRational::zero()
        };
        if got != want {
            return Ok((false, format!("g({n}) = {got}, want {want}")));
        }
    }
    Ok((true, format!("g(n) matches −2(n−1)!/0 through n = {max_n}")))
}

fn g_polynomial(max_n: usize) -> Result<(bool, String)> {
    for n in 1..=max_n {
        let poly = g_poly(n)?;
        // n!((1+x)^n − 1)/n has k-th coefficient (n−1)!·C(n,k) for k ≥ 1
        if !poly.coeff(0).is_zero() {
            return Ok((false, format!("g({n},x) has a constant term")));
        }
        for k in 1..=n {
            let want = BigRational::from_integer(
                factorial_int(n - 1) * num_integer::binomial(BigInt::from(n), BigInt::from(k)),
            );
            if poly.coeff(k) != want {
                return Ok((false, format!("g({n},x): coefficient of x^{k} is {}", poly.coeff(k))));
            }
        }
        if poly.degree() != Some(n) {
            return Ok((false, format!("g({n},x) has degree {:?}", poly.degree())));
        }
    }
    Ok((true, format!("g(n,x) matches n!((1+x)^n−1)/n through n = {max_n}")))
}

fn ordered_count(max_n: usize) -> Result<(bool, String)> {
    for n in 1..=max_n {
        for i in 1..=n {
            let (lhs, rhs) = ordered_ordered_count(n, i)?;
            if lhs != rhs {
                return Ok((false, format!("(n,i)=({n},{i}): {lhs} ≠ {rhs}")));
            }
        }
    }
    Ok((true, format!("ordered-pair counts agree through n = {max_n}")))
}

fn c_closed_form(max_ground: usize) -> Result<(bool, String)> {
    let mut checked = 0u64;
    for n in 1..=max_ground {
        for r in enumerate_set_partitions(n)? {
            let got = coefficient_c(&r)?;
            let has_even_part = r.parts().iter().any(|p| p.len() % 2 == 0);
            let want = if has_even_part {
                BigRational::zero()
            } else {
                let mut v = BigInt::one() << r.num_parts();
                for p in r.parts() {
                    v *= factorial_int(p.len() - 1);
                }
                BigRational::from_integer(v)
            };
            if got != want {
                return Ok((false, format!("c({r}) = {got}, want {want}")));
            }
            checked += 1;
        }
    }
    Ok((true, format!("{checked} partition coefficients match the closed form (ground ≤ {max_ground})")))
}

fn factorial_int(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

// ---------------------------------------------------------------------------
// propositions

fn propositions_suite(opts: &SuiteOptions) -> Vec<ReportItem> {
    let mut items = Vec::new();
    for n in 1..=opts.max_depth.min(3) {
        items.push(item(
            format!("propositions/symmetric-sum/n={n}"),
            proposition_sweep(n, verify_sn_proposition),
        ));
        items.push(item(
            format!("propositions/odd-partition/n={n}"),
            proposition_sweep(n, verify_oddpart_proposition),
        ));
    }
    items
}

fn signed_tuples(n: usize) -> Vec<SignedIndex> {
    let mut out = Vec::new();
    let choices: Vec<i64> = vec![1, 2, 3, -1, -2, -3];
    let mut stack: Vec<Vec<i64>> = vec![vec![]];
    while let Some(prefix) = stack.pop() {
        if prefix.len() == n {
            let entries = prefix
                .iter()
                .map(|&v| SignedInteger::from_signed(v).expect("nonzero"))
                .collect();
            out.push(SignedIndex::new(entries).expect("nonempty"));
            continue;
        }
        for &c in &choices {
            let mut next = prefix.clone();
            next.push(c);
            stack.push(next);
        }
    }
    out.sort();
    out
}

fn proposition_sweep(
    n: usize,
    check: impl Fn(&SignedIndex) -> Result<crate::formal::PropositionCheck>,
) -> Result<(bool, String)> {
    let tuples = signed_tuples(n);
    for s in &tuples {
        let result = check(s)?;
        if !result.holds {
            return Ok((false, format!("fails at {s}")));
        }
    }
    Ok((true, format!("{} signed tuples hold", tuples.len())))
}

// ---------------------------------------------------------------------------
// zhao

/// Convergent indices with entries in {1,2,3}, no adjacent pair of 1s,
/// weight ≤ `max_weight` — the domain of the two-one rewriting checks.
fn two_one_domain(max_weight: u32) -> Vec<Index> {
    convergent_indices(max_weight)
        .into_iter()
        .filter(|ix| !ix.parts().windows(2).any(|w| w == [1, 1]))
        .collect()
}

fn zhao_suite(opts: &SuiteOptions) -> Vec<ReportItem> {
    let mut items = Vec::new();
    let mut ev = Evaluator::new(opts.ctx.clone());
    let tolerance = pow10_neg(10, &opts.ctx);
    for ix in two_one_domain(opts.max_weight) {
        items.push(item(format!("zhao/{ix}"), two_one_residual(&ix, &mut ev, &tolerance)));
    }
    items
}

fn two_one_residual(
    ix: &Index,
    ev: &mut Evaluator,
    tolerance: &Real,
) -> Result<(bool, String)> {
    let star = ev.mzsv(ix)?;
    let expansion = zhao_star_expansion(ix)?;
    let expanded = ev.eval_formal(&expansion)?;
    let residual = star.value.sub(&expanded.value).abs();
    let detail = format!("residual {:.3e}", residual.to_f64());
    Ok((&residual <= tolerance, detail))
}

fn pow10_neg(digits: u32, ctx: &EvalContext) -> Real {
    let q = BigRational::new(BigInt::one(), BigInt::from(10u32).pow(digits));
    Real::from_rational(&q, crate::real::frac_limbs_for(ctx.precision_bits))
}

// ---------------------------------------------------------------------------
// eval

fn eval_suite(opts: &SuiteOptions) -> Vec<ReportItem> {
    let mut items = Vec::new();
    let mut ev = Evaluator::new(opts.ctx.clone());

    for lens in [vec![3u32], vec![2, 2, 2]] {
        let key = format!(
            "eval/certificate-blocks-({})",
            lens.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
        );
        items.push(item(key, certificate_check(&lens, &mut ev)));
    }

    items.push(item("eval/euler-identity", euler_identity(&mut ev)));

    for m in 1..=6u32 {
        items.push(item(format!("eval/star-twos/m={m}"), star_twos_check(m, &mut ev)));
    }

    for entries in [vec![2i64], vec![3], vec![1, 2], vec![2, 2], vec![-2], vec![-1, -1]] {
        let s = SignedIndex::new(
            entries
                .iter()
                .map(|&v| SignedInteger::from_signed(v).expect("nonzero"))
                .collect(),
        )
        .expect("nonempty");
        items.push(item(
            format!("eval/oracle-crosscheck/{s}"),
            oracle_crosscheck(&s, &mut ev),
        ));
    }

    items
}

fn certificate_check(lens: &[u32], ev: &mut Evaluator) -> Result<(bool, String)> {
    let cert = build_certificate(&BlockLengths::new(lens.to_vec())?)?;
    let tolerance = BigRational::new(BigInt::one(), BigInt::from(10u64).pow(10));
    let verified = ev.verify_certificate(&cert, &tolerance)?;
    let numeric = verified.numeric.expect("record filled by verification");
    Ok((numeric.pass, format!("residual {}", trim_decimal(&numeric.residual))))
}

fn euler_identity(ev: &mut Evaluator) -> Result<(bool, String)> {
    let nested = ev.mzv(&SignedIndex::new(vec![
        SignedInteger::plain(1)?,
        SignedInteger::plain(2)?,
    ])?)?;
    let single = ev.zeta_single(SignedInteger::plain(3)?)?;
    let gap = nested.value.sub(&single.value).abs();
    let allowed = nested.bound.add(&single.bound);
    Ok((gap <= allowed, format!("|ζ(1,2) − ζ(3)| = {:.3e}", gap.to_f64())))
}

fn star_twos_check(m: u32, ev: &mut Evaluator) -> Result<(bool, String)> {
    let star = ev.mzsv(&Index::new(vec![2; m as usize])?)?;
    let closed = ev.star_twos(m)?;
    let gap = star.value.sub(&closed.value).abs();
    let tolerance = pow10_neg(12, ev.context());
    Ok((gap <= tolerance, format!("gap {:.3e}", gap.to_f64())))
}

fn oracle_crosscheck(s: &SignedIndex, ev: &mut Evaluator) -> Result<(bool, String)> {
    let cutoff = ev.context().oracle_cutoff;
    let ctx = ev.context().clone();
    let series: EvalResult = ev.mzv(s)?;
    let oracle = dp_oracle(s, cutoff, &ctx)?;
    let gap = series.value.sub(&oracle.value).abs();
    let allowed = series.bound.add(&oracle.bound);
    Ok((
        gap <= allowed,
        format!("gap {:.3e} within {:.3e}", gap.to_f64(), allowed.to_f64()),
    ))
}

/// Shortens a decimal string for report details without losing sign or
/// leading digits ("0.00000000000000000000312…" stays recognizable).
fn trim_decimal(s: &str) -> String {
    if s.len() <= 40 {
        s.to_string()
    } else {
        format!("{}…", &s[..40])
    }
}
