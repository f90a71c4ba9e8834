//! Set partitions of `{1,…,n}`, the flatten map, and the exact coefficient
//! machinery used by the odd-partition expansion.
//!
//! Everything here is exact: coefficients are rationals (in fact integers),
//! and each closed form is paired with a brute-force enumeration so the two
//! can be checked against each other.

use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::{Error, Result};

/// Largest ground set the enumerations accept. Bell(12) ≈ 4.2·10⁶ partitions
/// is the most a caller can ask to materialize.
pub const MAX_GROUND_SET: usize = 12;

/// A partition of `{1,…,n}` into disjoint nonempty parts, kept in canonical
/// form: elements sorted within parts, parts sorted by minimum element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    n: usize,
    parts: Vec<Vec<usize>>,
}

impl SetPartition {
    pub fn new(n: usize, parts: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n + 1];
        let mut count = 0usize;
        for part in &parts {
            if part.is_empty() {
                return Err(Error::InvalidInput("empty part".into()));
            }
            for &e in part {
                if e == 0 || e > n {
                    return Err(Error::InvalidInput(format!(
                        "element {e} outside ground set 1..={n}"
                    )));
                }
                if seen[e] {
                    return Err(Error::InvalidInput(format!("element {e} repeated")));
                }
                seen[e] = true;
                count += 1;
            }
        }
        if count != n {
            return Err(Error::InvalidInput(format!(
                "parts cover {count} of {n} elements"
            )));
        }
        let mut parts: Vec<Vec<usize>> = parts
            .into_iter()
            .map(|mut p| {
                p.sort_unstable();
                p
            })
            .collect();
        parts.sort();
        Ok(SetPartition { n, parts })
    }

    /// Used by the enumerator, which produces canonical output directly.
    fn new_canonical(n: usize, parts: Vec<Vec<usize>>) -> Self {
        SetPartition { n, parts }
    }

    pub fn ground_set_size(&self) -> usize {
        self.n
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    pub fn all_parts_odd(&self) -> bool {
        self.parts.iter().all(|p| p.len() % 2 == 1)
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, part) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            for (j, e) in part.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{e}")?;
            }
        }
        write!(f, "}}")
    }
}

fn check_ground_budget(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Empty);
    }
    if n > MAX_GROUND_SET {
        return Err(Error::Budget {
            what: "set-partition ground set",
            limit: MAX_GROUND_SET,
            got: n,
        });
    }
    Ok(())
}

/// All partitions of `{1,…,n}` in canonical form. The order is by recursive
/// placement (element k joins existing parts in order, then opens a new
/// part), which puts the all-in-one partition first and singletons last.
pub fn enumerate_set_partitions(n: usize) -> Result<Vec<SetPartition>> {
    check_ground_budget(n)?;
    let mut out = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    place(1, n, &mut groups, &mut out);
    Ok(out)
}

fn place(e: usize, n: usize, groups: &mut Vec<Vec<usize>>, out: &mut Vec<SetPartition>) {
    if e > n {
        out.push(SetPartition::new_canonical(n, groups.clone()));
        return;
    }
    for i in 0..groups.len() {
        groups[i].push(e);
        place(e + 1, n, groups, out);
        groups[i].pop();
    }
    groups.push(vec![e]);
    place(e + 1, n, groups, out);
    groups.pop();
}

/// The partitions of `{1,…,n}` all of whose parts have odd size.
pub fn enumerate_odd_partitions(n: usize) -> Result<Vec<SetPartition>> {
    Ok(enumerate_set_partitions(n)?
        .into_iter()
        .filter(SetPartition::all_parts_odd)
        .collect())
}

/// Merges the parts of `q` according to `t`: part `i` of the result is the
/// union of the `q`-parts indexed by `tᵢ` (indices into `q`'s canonical part
/// order, 1-based). `t` must partition `{1,…,#q}`.
pub fn flatten(q: &SetPartition, t: &SetPartition) -> Result<SetPartition> {
    if t.ground_set_size() != q.num_parts() {
        return Err(Error::InvalidInput(format!(
            "flatten: t partitions {{1..{}}} but q has {} parts",
            t.ground_set_size(),
            q.num_parts()
        )));
    }
    let merged: Vec<Vec<usize>> = t
        .parts()
        .iter()
        .map(|ti| {
            ti.iter()
                .flat_map(|&j| q.parts()[j - 1].iter().copied())
                .collect()
        })
        .collect();
    SetPartition::new(q.ground_set_size(), merged)
}

pub(crate) fn factorial(k: usize) -> BigInt {
    let mut f = BigInt::one();
    for i in 2..=k {
        f *= i;
    }
    f
}

/// All partitions of an arbitrary element set, via the `{1..k}` enumeration.
fn partitions_of_elements(elements: &[usize]) -> Result<Vec<Vec<Vec<usize>>>> {
    Ok(enumerate_set_partitions(elements.len())?
        .into_iter()
        .map(|p| {
            p.parts()
                .iter()
                .map(|part| part.iter().map(|&j| elements[j - 1]).collect())
                .collect()
        })
        .collect())
}

/// The coefficient attached to a merged partition `r` when a double sum over
/// pairs `(q,t)` with `flatten(q,t) = r` is collapsed:
///
/// ```text
/// c_r = Σ_{(q,t): flatten(q,t)=r} 2^{#q} (−1)^{#q−#t} Π #qᵢ! · Π (#tⱼ−1)!
/// ```
///
/// The fibre over `r` is enumerated directly: choose, independently for each
/// part `rⱼ`, a partition `Tⱼ` of its elements; `q` is the union of the `Tⱼ`
/// and `t` groups `q`'s parts by the `rⱼ` they refine.
pub fn coefficient_c(r: &SetPartition) -> Result<BigRational> {
    if r.ground_set_size() > 9 {
        return Err(Error::Budget {
            what: "coefficient_c ground set",
            limit: 9,
            got: r.ground_set_size(),
        });
    }
    let per_part: Vec<Vec<Vec<Vec<usize>>>> = r
        .parts()
        .iter()
        .map(|part| partitions_of_elements(part))
        .collect::<Result<_>>()?;
    let num_r_parts = r.num_parts();
    let mut total = BigInt::zero();
    for combo in per_part.iter().multi_cartesian_product() {
        let num_q_parts: usize = combo.iter().map(|t_j| t_j.len()).sum();
        let mut term = BigInt::one() << num_q_parts; // 2^{#q}
        if (num_q_parts - num_r_parts) % 2 == 1 {
            term = -term;
        }
        for t_j in &combo {
            term *= factorial(t_j.len() - 1); // (#tⱼ−1)!
            for q_part in *t_j {
                term *= factorial(q_part.len()); // #qᵢ!
            }
        }
        total += term;
    }
    Ok(BigRational::from_integer(total))
}

/// Brute-force evaluation of
/// `g(n) = Σ_{w ∈ Part(n)} (−2)^{#w} Π #w_l! · (#w−1)!`.
pub fn g_bruteforce(n: usize) -> Result<BigRational> {
    if n > 10 {
        return Err(Error::Budget {
            what: "g ground set",
            limit: 10,
            got: n,
        });
    }
    let mut total = BigInt::zero();
    for w in enumerate_set_partitions(n)? {
        let k = w.num_parts();
        let mut term = BigInt::one() << k; // |−2|^{#w}
        if k % 2 == 1 {
            term = -term;
        }
        term *= factorial(k - 1);
        for part in w.parts() {
            term *= factorial(part.len());
        }
        total += term;
    }
    Ok(BigRational::from_integer(total))
}

/// A polynomial with exact rational coefficients, `coeffs[k]` the degree-`k`
/// coefficient, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPolynomial {
    coeffs: Vec<BigRational>,
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RationalPolynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

/// The generating polynomial `g(n,x) = Σ_{w ∈ Part(n)} x^{#w} Π #w_l! · (#w−1)!`,
/// assembled term by term from the enumeration. Satisfies
/// `g(n,x) = n!((1+x)^n − 1)/n` coefficientwise and `g(n,−2) = g(n)`.
pub fn g_poly(n: usize) -> Result<RationalPolynomial> {
    if n > 10 {
        return Err(Error::Budget {
            what: "g ground set",
            limit: 10,
            got: n,
        });
    }
    let mut coeffs = vec![BigInt::zero(); n + 1];
    for w in enumerate_set_partitions(n)? {
        let k = w.num_parts();
        let mut term = factorial(k - 1);
        for part in w.parts() {
            term *= factorial(part.len());
        }
        coeffs[k] += term;
    }
    Ok(RationalPolynomial::new(
        coeffs.into_iter().map(BigRational::from_integer).collect(),
    ))
}

/// Counts ordered partitions of `{1,…,n}` into `i` ordered parts two ways:
/// over set partitions (`Σ_{#w=i} i!·Π #w_l!`) and by the stars-and-bars
/// closed form (`n!·C(n−1,i−1)`). Returns `(partition_side, bars_side)`.
pub fn ordered_ordered_count(n: usize, i: usize) -> Result<(BigInt, BigInt)> {
    if n > 10 {
        return Err(Error::Budget {
            what: "ordered/ordered ground set",
            limit: 10,
            got: n,
        });
    }
    if i == 0 || i > n {
        return Err(Error::InvalidInput(format!(
            "part count {i} outside 1..={n}"
        )));
    }
    let mut partition_side = BigInt::zero();
    for w in enumerate_set_partitions(n)? {
        if w.num_parts() != i {
            continue;
        }
        let mut term = factorial(i);
        for part in w.parts() {
            term *= factorial(part.len());
        }
        partition_side += term;
    }
    let bars_side = factorial(n) * num_integer::binomial(BigInt::from(n - 1), BigInt::from(i - 1));
    Ok((partition_side, bars_side))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(n: usize, parts: &[&[usize]]) -> SetPartition {
        SetPartition::new(n, parts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    fn int(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    const BELL: [usize; 9] = [1, 1, 2, 5, 15, 52, 203, 877, 4140];

    #[test]
    fn enumeration_counts_match_bell_numbers() {
        for n in 1..=8 {
            let all = enumerate_set_partitions(n).unwrap();
            assert_eq!(all.len(), BELL[n], "Bell({n})");
            // canonical and duplicate-free
            let mut sorted = all.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), all.len());
            for p in &all {
                let rebuilt =
                    SetPartition::new(n, p.parts().to_vec()).expect("canonical stays valid");
                assert_eq!(&rebuilt, p);
            }
        }
    }

    #[test]
    fn enumeration_budget() {
        assert!(enumerate_set_partitions(0).is_err());
        assert!(enumerate_set_partitions(13).is_err());
    }

    #[test]
    fn odd_partitions_small_cases() {
        assert_eq!(
            enumerate_odd_partitions(3).unwrap().into_iter().sorted().collect::<Vec<_>>(),
            vec![sp(3, &[&[1], &[2], &[3]]), sp(3, &[&[1, 2, 3]])]
                .into_iter()
                .sorted()
                .collect::<Vec<_>>()
        );
        assert_eq!(enumerate_odd_partitions(2).unwrap(), vec![sp(2, &[&[1], &[2]])]);
        let odd4: Vec<SetPartition> = enumerate_odd_partitions(4).unwrap().into_iter().sorted().collect();
        let expected4: Vec<SetPartition> = vec![
            sp(4, &[&[1], &[2, 3, 4]]),
            sp(4, &[&[2], &[1, 3, 4]]),
            sp(4, &[&[3], &[1, 2, 4]]),
            sp(4, &[&[4], &[1, 2, 3]]),
            sp(4, &[&[1], &[2], &[3], &[4]]),
        ]
        .into_iter()
        .sorted()
        .collect();
        assert_eq!(odd4, expected4);
    }

    #[test]
    fn flatten_worked_example() {
        let q = sp(8, &[&[1, 2, 4], &[3, 5], &[6, 8], &[7]]);
        let t = sp(4, &[&[1, 3, 4], &[2]]);
        assert_eq!(
            flatten(&q, &t).unwrap(),
            sp(8, &[&[1, 2, 4, 6, 7, 8], &[3, 5]])
        );
    }

    #[test]
    fn flatten_identity_and_total() {
        let q = sp(5, &[&[1, 4], &[2], &[3, 5]]);
        let singletons = sp(3, &[&[1], &[2], &[3]]);
        assert_eq!(flatten(&q, &singletons).unwrap(), q);
        let all = sp(3, &[&[1, 2, 3]]);
        assert_eq!(flatten(&q, &all).unwrap(), sp(5, &[&[1, 2, 3, 4, 5]]));
        let q2 = sp(2, &[&[1], &[2]]);
        assert_eq!(
            flatten(&q2, &sp(2, &[&[1, 2]])).unwrap(),
            sp(2, &[&[1, 2]])
        );
        // t must partition exactly {1..#q}
        assert!(flatten(&q2, &sp(3, &[&[1, 2, 3]])).is_err());
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(coefficient_c(&sp(1, &[&[1]])).unwrap(), int(2));
        assert_eq!(coefficient_c(&sp(2, &[&[1, 2]])).unwrap(), int(0));
        assert_eq!(coefficient_c(&sp(3, &[&[1, 2, 3]])).unwrap(), int(4));
    }

    /// Even-sized part ⇒ 0; all parts odd ⇒ 2^{#r} Π (#rᵢ−1)!.
    #[test]
    fn coefficient_closed_form_up_to_6() {
        for n in 1..=6 {
            for r in enumerate_set_partitions(n).unwrap() {
                let expected = if r.all_parts_odd() {
                    let mut v = BigInt::one() << r.num_parts();
                    for part in r.parts() {
                        v *= factorial(part.len() - 1);
                    }
                    BigRational::from_integer(v)
                } else {
                    BigRational::zero()
                };
                assert_eq!(coefficient_c(&r).unwrap(), expected, "r = {r}");
            }
        }
    }

    #[test]
    fn g_examples_and_parity() {
        assert_eq!(g_bruteforce(1).unwrap(), int(-2));
        assert_eq!(g_bruteforce(2).unwrap(), int(0));
        assert_eq!(g_bruteforce(3).unwrap(), int(-4));
        for n in 1..=8 {
            let expected = if n % 2 == 1 {
                -BigRational::from_integer(factorial(n - 1) * 2)
            } else {
                BigRational::zero()
            };
            assert_eq!(g_bruteforce(n).unwrap(), expected, "g({n})");
        }
    }

    #[test]
    fn g_poly_small_cases() {
        assert_eq!(g_poly(1).unwrap(), RationalPolynomial::new(vec![int(0), int(1)]));
        assert_eq!(
            g_poly(2).unwrap(),
            RationalPolynomial::new(vec![int(0), int(2), int(1)])
        );
    }

    /// g(n,x) = n!((1+x)^n − 1)/n, i.e. degree-k coefficient (n−1)!·C(n,k).
    #[test]
    fn g_poly_closed_form_up_to_10() {
        for n in 1..=10usize {
            let got = g_poly(n).unwrap();
            let mut coeffs = vec![BigRational::zero()];
            for k in 1..=n {
                coeffs.push(BigRational::from_integer(
                    factorial(n - 1) * num_integer::binomial(BigInt::from(n), BigInt::from(k)),
                ));
            }
            assert_eq!(got, RationalPolynomial::new(coeffs), "n = {n}");
        }
    }

    #[test]
    fn g_poly_at_minus_two_matches_g() {
        for n in 1..=8 {
            assert_eq!(g_poly(n).unwrap().eval(&int(-2)), g_bruteforce(n).unwrap());
        }
    }

    #[test]
    fn ordered_ordered_examples() {
        let (p, b) = ordered_ordered_count(3, 2).unwrap();
        assert_eq!(p, BigInt::from(12));
        assert_eq!(b, BigInt::from(12));
        // 4·(2!·3!·1!) + 3·(2!·2!·2!) = 48 + 24 on the partition side,
        // 4!·C(3,1) on the bars side.
        let (p, b) = ordered_ordered_count(4, 2).unwrap();
        assert_eq!(p, BigInt::from(72));
        assert_eq!(b, BigInt::from(72));
        for n in 1..=6 {
            let (p, b) = ordered_ordered_count(n, 1).unwrap();
            assert_eq!(p, factorial(n));
            assert_eq!(b, factorial(n));
        }
    }

    #[test]
    fn ordered_ordered_agrees_up_to_8() {
        for n in 1..=8 {
            for i in 1..=n {
                let (p, b) = ordered_ordered_count(n, i).unwrap();
                assert_eq!(p, b, "(n,i) = ({n},{i})");
            }
        }
    }
}
