//! Exact symbolic layer: rational combinations of zeta monomials.
//!
//! A [`FormalSum`] is a finite map from monomials (sorted multisets of
//! [`Atom`]s) to exact rational coefficients. Equality is structural on the
//! canonical form — no analytic relations between atoms are ever applied.
//! On top of this the module builds both sides of the block-permutation
//! identity ([`theorem_lhs`]/[`theorem_rhs`]), the star-to-alternating
//! expansion ([`zhao_star_expansion`]), two purely formal permutation
//! identities with machine-checkable witnesses, and the self-contained
//! [`IdentityCertificate`] that the CLI and FFI emit as JSON.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::partitions::{enumerate_odd_partitions, enumerate_set_partitions, factorial};
use crate::signed_index::{
    epsilon_sign, oplus, pi_expansion, s1_from_blocks, SignedIndex, SignedInteger,
};
use crate::word::{block_recompose, word_to_index, BlockLengths, Index};
use crate::{Error, Result};

/// Most blocks a single identity may have (the permutation sum has n! terms).
pub const MAX_BLOCKS: usize = 6;
/// Deepest signed index the proposition verifiers accept.
pub const MAX_PROPOSITION_DEPTH: usize = 5;
/// Most arguments the symmetric-sum expansion accepts.
pub const MAX_SYMMETRIC_ARGS: usize = 8;
/// Deepest derived index the star expansion will expand (2^depth terms).
pub const MAX_STAR_EXPANSION_DEPTH: usize = 24;

/// An indivisible zeta symbol.
///
/// `SingleZeta(s)` is the depth-one value ζ(s) and requires magnitude ≥ 2
/// when unbarred (ζ(1) diverges; ζ(1̄) = −ln 2 is fine). `Mzv` and `Mzsv`
/// are multiple zeta values and star values of their index; `StarTwos(m)`
/// abbreviates ζ*({2}^m). The derived ordering fixes the canonical factor
/// order inside monomials.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    SingleZeta(SignedInteger),
    Mzv(SignedIndex),
    Mzsv(Index),
    StarTwos(u32),
}

impl Atom {
    /// Depth-one zeta, rejecting the divergent ζ(1).
    pub fn single_zeta(s: SignedInteger) -> Result<Atom> {
        if !s.is_barred() && s.magnitude() < 2 {
            return Err(Error::Divergent("zeta(1) has no value".into()));
        }
        Ok(Atom::SingleZeta(s))
    }

    /// Depth-one zeta of `s` as an atom: a `SingleZeta` when that is legal,
    /// otherwise the formal depth-one `Mzv` (used for generic arguments that
    /// may instantiate to 1).
    pub fn single_or_depth_one(s: SignedInteger) -> Atom {
        if !s.is_barred() && s.magnitude() < 2 {
            Atom::Mzv(SignedIndex::new(vec![s]).expect("depth one"))
        } else {
            Atom::SingleZeta(s)
        }
    }

    /// Star value atom, which must be convergent.
    pub fn mzsv(index: Index) -> Result<Atom> {
        if !index.is_convergent() {
            return Err(Error::Divergent(format!("star index {index} diverges")));
        }
        Ok(Atom::Mzsv(index))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::SingleZeta(s) => write!(f, "zeta({s})"),
            Atom::Mzv(ix) => write!(f, "zeta{ix}"),
            Atom::Mzsv(ix) => write!(f, "zeta*{ix}"),
            Atom::StarTwos(m) => write!(f, "zeta*({{2}}^{m})"),
        }
    }
}

impl Serialize for Atom {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        match self {
            Atom::SingleZeta(s) => {
                map.serialize_entry("kind", "zeta")?;
                map.serialize_entry("arg", &s.to_signed())?;
            }
            Atom::Mzv(ix) => {
                map.serialize_entry("kind", "mzv")?;
                map.serialize_entry("index", ix)?;
            }
            Atom::Mzsv(ix) => {
                map.serialize_entry("kind", "mzsv")?;
                map.serialize_entry("index", ix)?;
            }
            Atom::StarTwos(m) => {
                map.serialize_entry("kind", "star2s")?;
                map.serialize_entry("m", m)?;
            }
        }
        map.end()
    }
}

/// A product of atoms, kept sorted; the empty product is the constant 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    factors: Vec<Atom>,
}

impl Monomial {
    pub fn new(mut factors: Vec<Atom>) -> Self {
        factors.sort();
        Monomial { factors }
    }

    pub fn one() -> Self {
        Monomial { factors: Vec::new() }
    }

    pub fn factors(&self) -> &[Atom] {
        &self.factors
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (atom, group) in &self.factors.iter().chunk_by(|a| (*a).clone()) {
            if !first {
                write!(f, "·")?;
            }
            first = false;
            let count = group.count();
            if count == 1 {
                write!(f, "{atom}")?;
            } else {
                write!(f, "{atom}^{count}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.factors.len()))?;
        for atom in &self.factors {
            seq.serialize_element(atom)?;
        }
        seq.end()
    }
}

/// A finite rational combination of monomials, normalized so that no zero
/// coefficient is stored. Equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FormalSum {
    terms: BTreeMap<Monomial, BigRational>,
}

impl FormalSum {
    pub fn zero() -> Self {
        FormalSum::default()
    }

    pub fn term(coeff: BigRational, monomial: Monomial) -> Self {
        let mut s = FormalSum::zero();
        s.add_term(&coeff, monomial);
        s
    }

    pub fn add_term(&mut self, coeff: &BigRational, monomial: Monomial) {
        if coeff.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry(monomial)
            .or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            let key = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .expect("just inserted");
            self.terms.remove(&key);
        }
    }

    /// Adds `scale · other` into `self`.
    pub fn add_scaled(&mut self, other: &FormalSum, scale: &BigRational) {
        for (monomial, coeff) in &other.terms {
            self.add_term(&(coeff * scale), monomial.clone());
        }
    }

    pub fn add(&self, other: &FormalSum) -> FormalSum {
        let mut out = self.clone();
        out.add_scaled(other, &BigRational::one());
        out
    }

    pub fn sub(&self, other: &FormalSum) -> FormalSum {
        let mut out = self.clone();
        out.add_scaled(other, &-BigRational::one());
        out
    }

    pub fn scaled(&self, scale: &BigRational) -> FormalSum {
        let mut out = FormalSum::zero();
        out.add_scaled(self, scale);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, monomial: &Monomial) -> BigRational {
        self.terms
            .get(monomial)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// First monomial (in canonical order) whose coefficients differ.
    pub fn first_difference(&self, other: &FormalSum) -> Option<Monomial> {
        self.sub(other).terms.keys().next().cloned()
    }
}

impl fmt::Display for FormalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (monomial, coeff)) in self.terms.iter().enumerate() {
            if i == 0 {
                if coeff.is_negative() {
                    write!(f, "-")?;
                }
            } else if coeff.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = coeff.abs();
            if mag.is_one() {
                write!(f, "{monomial}")?;
            } else {
                write!(f, "{mag}·{monomial}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for FormalSum {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            coeff: String,
            monomial: &'a Monomial,
        }
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (monomial, coeff) in &self.terms {
            seq.serialize_element(&Term {
                coeff: coeff.to_string(),
                monomial,
            })?;
        }
        seq.end()
    }
}

/// The joining symbol in front of the permuted block lengths: a literal new
/// block of length 2 (`Comma`) or 2 added onto the first block (`Plus`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Circ {
    Comma,
    Plus,
}

impl Circ {
    pub fn symbol(self) -> &'static str {
        match self {
            Circ::Comma => ",",
            Circ::Plus => "+",
        }
    }
}

impl fmt::Display for Circ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl Serialize for Circ {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.symbol())
    }
}

/// Parity rule choosing the join: a comma exactly when the block count and
/// the total block length have the same parity — which is also exactly the
/// condition for every joined word to end in the letter 1.
pub fn circ_rule(n: usize, total: u32) -> Circ {
    if n % 2 == total as usize % 2 {
        Circ::Comma
    } else {
        Circ::Plus
    }
}

fn check_identity_pre(lengths: &BlockLengths) -> Result<()> {
    if lengths.len() > MAX_BLOCKS {
        return Err(Error::Budget {
            what: "identity block count",
            limit: MAX_BLOCKS,
            got: lengths.len(),
        });
    }
    if lengths.lengths().iter().any(|&l| l < 2) {
        return Err(Error::BlockLengthTooSmall);
    }
    Ok(())
}

/// The n! star indices on the left side of the identity: for each permutation
/// of the block lengths, join a 2 in front (by comma or plus per
/// [`circ_rule`]) and read the resulting word as a star index. All outputs
/// are convergent and share the weight `Σℓ` (the joined word has `Σℓ + 2`
/// letters).
pub fn theorem_lhs(lengths: &BlockLengths) -> Result<Vec<Index>> {
    check_identity_pre(lengths)?;
    let n = lengths.len();
    let circ = circ_rule(n, lengths.total());
    let mut out = Vec::new();
    for perm in lengths.lengths().iter().copied().permutations(n) {
        let blocks = match circ {
            Circ::Comma => {
                let mut b = vec![2u32];
                b.extend(&perm);
                b
            }
            Circ::Plus => {
                let mut b = perm.clone();
                b[0] += 2;
                b
            }
        };
        let word = block_recompose(&BlockLengths::new(blocks)?);
        let index = word_to_index(&word)?;
        debug_assert!(index.is_convergent());
        debug_assert_eq!(index.weight(), lengths.total());
        out.push(index);
    }
    Ok(out)
}

/// The weighting ζ̃: plain zeta at odd arguments, half the all-twos star
/// value at even ones. Returns the rational prefactor with the atom.
pub fn tilde_zeta(m: u32) -> Result<(BigRational, Atom)> {
    if m < 2 {
        return Err(Error::InvalidInput(format!(
            "tilde-zeta argument {m} must be ≥ 2"
        )));
    }
    if m % 2 == 1 {
        Ok((
            BigRational::one(),
            Atom::single_zeta(SignedInteger::plain(m)?)?,
        ))
    } else {
        Ok((
            BigRational::new(BigInt::one(), BigInt::from(2)),
            Atom::StarTwos(m / 2),
        ))
    }
}

/// The right side of the identity: over partitions of the block positions
/// into odd-sized parts, weight `2^{#r} Π(#rᵢ−1)!` times the product of ζ̃
/// at each part's length sum.
pub fn theorem_rhs(lengths: &BlockLengths) -> Result<FormalSum> {
    check_identity_pre(lengths)?;
    let n = lengths.len();
    let mut sum = FormalSum::zero();
    for r in enumerate_odd_partitions(n)? {
        let mut coeff = BigRational::from_integer(BigInt::one() << r.num_parts());
        let mut factors = Vec::with_capacity(r.num_parts());
        for part in r.parts() {
            coeff *= BigRational::from_integer(factorial(part.len() - 1));
            let m: u32 = part.iter().map(|&j| lengths.lengths()[j - 1]).sum();
            let (c, atom) = tilde_zeta(m)?;
            coeff *= c;
            factors.push(atom);
        }
        sum.add_term(&coeff, Monomial::new(factors));
    }
    Ok(sum)
}

/// Expands a star value into a signed combination of alternating multiple
/// zeta values: `ε(s) Σ_p 2^{#p} ζ(p)` over the comma/plus expansions of the
/// derived index of `s`.
pub fn zhao_star_expansion(s: &Index) -> Result<FormalSum> {
    if !s.is_convergent() {
        return Err(Error::Divergent(format!("star index {s} diverges")));
    }
    let derived = s1_from_blocks(s)?;
    if derived.depth() > MAX_STAR_EXPANSION_DEPTH {
        return Err(Error::Budget {
            what: "star expansion depth",
            limit: MAX_STAR_EXPANSION_DEPTH,
            got: derived.depth(),
        });
    }
    let eps = BigRational::from_integer(BigInt::from(epsilon_sign(s)));
    let mut sum = FormalSum::zero();
    for p in pi_expansion(&derived) {
        let coeff = &eps * BigRational::from_integer(BigInt::one() << p.depth());
        sum.add_term(&coeff, Monomial::new(vec![Atom::Mzv(p)]));
    }
    Ok(sum)
}

/// Outcome of a formal identity check: whether the two sides agree, and on
/// failure the first monomial where they differ.
#[derive(Debug, Clone)]
pub struct PropositionCheck {
    pub holds: bool,
    pub witness: Option<Monomial>,
}

fn check_proposition_depth(n: usize) -> Result<()> {
    if n > MAX_PROPOSITION_DEPTH {
        return Err(Error::Budget {
            what: "proposition index depth",
            limit: MAX_PROPOSITION_DEPTH,
            got: n,
        });
    }
    Ok(())
}

fn compare(lhs: &FormalSum, rhs: &FormalSum) -> PropositionCheck {
    let witness = lhs.first_difference(rhs);
    PropositionCheck {
        holds: witness.is_none(),
        witness,
    }
}

/// ⊕-sums of the entries of `s` over each part of a set partition,
/// in the partition's canonical part order.
fn part_sums(s: &SignedIndex, parts: &[Vec<usize>]) -> Vec<SignedInteger> {
    parts
        .iter()
        .map(|part| {
            part.iter()
                .map(|&j| s.entries()[j - 1])
                .reduce(oplus)
                .expect("parts are nonempty")
        })
        .collect()
}

/// Checks, purely formally, that the permutation sum of comma/plus
/// expansions can be reorganized as a sum over set partitions:
///
/// ```text
/// Σ_{σ∈S_n} Σ_{p∈Π(σ·s)} 2^{#p} [p]  =  Σ_{q} 2^{#q} Π #qᵢ! Σ_{τ∈S_{#q}} [q-sums permuted]
/// ```
///
/// Both sides are formal sums over multiple-zeta atoms; no analytic
/// relations enter.
pub fn verify_sn_proposition(s: &SignedIndex) -> Result<PropositionCheck> {
    let n = s.depth();
    check_proposition_depth(n)?;
    let mut lhs = FormalSum::zero();
    for perm in s.entries().iter().copied().permutations(n) {
        let permuted = SignedIndex::new(perm)?;
        for p in pi_expansion(&permuted) {
            let coeff = BigRational::from_integer(BigInt::one() << p.depth());
            lhs.add_term(&coeff, Monomial::new(vec![Atom::Mzv(p)]));
        }
    }
    let mut rhs = FormalSum::zero();
    for q in enumerate_set_partitions(n)? {
        let sums = part_sums(s, q.parts());
        let t = sums.len();
        let mut coeff = BigInt::one() << t;
        for part in q.parts() {
            coeff *= factorial(part.len());
        }
        let coeff = BigRational::from_integer(coeff);
        for perm in sums.iter().copied().permutations(t) {
            lhs_rhs_term(&mut rhs, &coeff, perm)?;
        }
    }
    Ok(compare(&lhs, &rhs))
}

fn lhs_rhs_term(
    sum: &mut FormalSum,
    coeff: &BigRational,
    entries: Vec<SignedInteger>,
) -> Result<()> {
    sum.add_term(coeff, Monomial::new(vec![Atom::Mzv(SignedIndex::new(entries)?)]));
    Ok(())
}

/// The product-of-depth-one-zetas expansion of the symmetrized sum
/// `Σ_{τ} ζ(a_{τ(1)},…,a_{τ(t)})`: over set partitions `P` of the argument
/// positions, `(−1)^{t−#P} Π (#Pⱼ−1)!` times the product of depth-one zetas
/// at each part's ⊕-sum.
pub fn symmetric_sum_expand(args: &[SignedInteger]) -> Result<FormalSum> {
    let t = args.len();
    if t == 0 {
        return Err(Error::Empty);
    }
    if t > MAX_SYMMETRIC_ARGS {
        return Err(Error::Budget {
            what: "symmetric sum arguments",
            limit: MAX_SYMMETRIC_ARGS,
            got: t,
        });
    }
    let mut sum = FormalSum::zero();
    for p in enumerate_set_partitions(t)? {
        let mut coeff = BigInt::one();
        if (t - p.num_parts()) % 2 == 1 {
            coeff = -coeff;
        }
        let mut factors = Vec::with_capacity(p.num_parts());
        for part in p.parts() {
            coeff *= factorial(part.len() - 1);
            let arg = part
                .iter()
                .map(|&j| args[j - 1])
                .reduce(oplus)
                .expect("parts are nonempty");
            factors.push(Atom::single_or_depth_one(arg));
        }
        sum.add_term(&BigRational::from_integer(coeff), Monomial::new(factors));
    }
    Ok(sum)
}

/// Checks, purely formally, that replacing each permuted-argument sum in the
/// right side of [`verify_sn_proposition`] by its symmetric-sum expansion
/// collapses to a sum over odd partitions:
///
/// ```text
/// Σ_{q} 2^{#q} Π #qᵢ! · symexpand(q-sums)  =  Σ_{r odd} 2^{#r} Π (#rᵢ−1)! Π [rᵢ-sum]
/// ```
pub fn verify_oddpart_proposition(s: &SignedIndex) -> Result<PropositionCheck> {
    let n = s.depth();
    check_proposition_depth(n)?;
    let mut lhs = FormalSum::zero();
    for q in enumerate_set_partitions(n)? {
        let mut coeff = BigInt::one() << q.num_parts();
        for part in q.parts() {
            coeff *= factorial(part.len());
        }
        let expansion = symmetric_sum_expand(&part_sums(s, q.parts()))?;
        lhs.add_scaled(&expansion, &BigRational::from_integer(coeff));
    }
    let mut rhs = FormalSum::zero();
    for r in enumerate_odd_partitions(n)? {
        let mut coeff = BigInt::one() << r.num_parts();
        let mut factors = Vec::with_capacity(r.num_parts());
        for (part, arg) in r.parts().iter().zip(part_sums(s, r.parts())) {
            coeff *= factorial(part.len() - 1);
            factors.push(Atom::single_or_depth_one(arg));
        }
        rhs.add_term(&BigRational::from_integer(coeff), Monomial::new(factors));
    }
    Ok(compare(&lhs, &rhs))
}

/// Numeric verification record attached to a certificate: both side values,
/// residual, combined error bound (all as decimal strings), whether the
/// bound is fully rigorous, and the verdict.
#[derive(Debug, Clone, Serialize)]
pub struct NumericRecord {
    pub lhs: String,
    pub rhs: String,
    pub residual: String,
    pub bound: String,
    pub rigorous: bool,
    pub pass: bool,
}

/// A fully assembled instance of the identity: block lengths, the join
/// symbol, the n! star indices on the left, the formal sum on the right, and
/// (after numeric verification) an evaluation record.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityCertificate {
    pub blocks: BlockLengths,
    pub circ: Circ,
    pub lhs: Vec<Index>,
    pub rhs: FormalSum,
    pub numeric: Option<NumericRecord>,
}

/// Builds the certificate for one choice of block lengths; the numeric
/// record is left unset for the evaluator to fill.
pub fn build_certificate(lengths: &BlockLengths) -> Result<IdentityCertificate> {
    let circ = circ_rule(lengths.len(), lengths.total());
    Ok(IdentityCertificate {
        blocks: lengths.clone(),
        circ,
        lhs: theorem_lhs(lengths)?,
        rhs: theorem_rhs(lengths)?,
        numeric: None,
    })
}
