//! Sign-magnitude fixed-point reals on 64-bit limbs.
//!
//! A `Real` has a fixed number of fraction limbs plus two integer limbs of
//! headroom (128 bits — far above any magnitude the evaluators produce).
//! Every operation truncates toward zero at the fixed width, so a single op
//! is exact to within one unit in the last place; callers account for
//! accumulated truncation with a flat slop term rather than per-op tracking.
//!
//! Only the operations the series evaluators need are provided: addition,
//! subtraction, multiplication, division by a machine word, binary shifts,
//! and conversions to and from exact rationals and decimal strings.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::ToPrimitive;

/// Integer-part limbs kept above the binary point.
const INT_LIMBS: usize = 2;

/// Fraction limbs needed so that `precision_bits` of result survive the
/// guard bits reserved for truncation noise.
pub fn frac_limbs_for(precision_bits: u32) -> usize {
    (precision_bits as usize + 128).div_ceil(64)
}

/// Fixed-point real number: value = (−1)^neg · Σ limbs[i]·2^{64(i−frac_limbs)},
/// limbs little-endian with `frac_limbs + INT_LIMBS` entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Real {
    neg: bool,
    limbs: Vec<u64>,
    frac_limbs: usize,
}

impl Real {
    pub fn zero(frac_limbs: usize) -> Self {
        Real {
            neg: false,
            limbs: vec![0; frac_limbs + INT_LIMBS],
            frac_limbs,
        }
    }

    pub fn one(frac_limbs: usize) -> Self {
        Self::from_u64(1, frac_limbs)
    }

    pub fn from_u64(v: u64, frac_limbs: usize) -> Self {
        let mut r = Self::zero(frac_limbs);
        r.limbs[frac_limbs] = v;
        r
    }

    /// 2^exp, truncated to zero if it underflows the last place and panicking
    /// if it overflows the integer headroom.
    pub fn pow2(exp: i64, frac_limbs: usize) -> Self {
        let mut r = Self::zero(frac_limbs);
        let shifted = exp + 64 * frac_limbs as i64;
        if shifted < 0 {
            return r;
        }
        let (limb, bit) = (shifted as usize / 64, shifted as usize % 64);
        assert!(limb < r.limbs.len(), "fixed-point overflow in pow2");
        r.limbs[limb] = 1 << bit;
        r
    }

    /// One unit in the last place: the smallest positive representable value.
    pub fn ulp(frac_limbs: usize) -> Self {
        let mut r = Self::zero(frac_limbs);
        r.limbs[0] = 1;
        r
    }

    /// Nearest representable value toward zero.
    pub fn from_rational(q: &BigRational, frac_limbs: usize) -> Self {
        let scaled: BigInt = (q.numer() << (64 * frac_limbs)) / q.denom();
        let (sign, mag) = scaled.into_parts();
        let digits = mag.to_u64_digits();
        let mut r = Self::zero(frac_limbs);
        assert!(
            digits.len() <= r.limbs.len(),
            "fixed-point overflow converting rational"
        );
        r.limbs[..digits.len()].copy_from_slice(&digits);
        r.neg = sign == Sign::Minus && !r.is_zero();
        r
    }

    pub fn to_rational(&self) -> BigRational {
        let mag = BigUint::from_slice(
            &self
                .limbs
                .iter()
                .flat_map(|&l| [l as u32, (l >> 32) as u32])
                .collect::<Vec<_>>(),
        );
        let mut num = BigInt::from(mag);
        if self.neg {
            num = -num;
        }
        BigRational::new(num, BigInt::from(1u8) << (64 * self.frac_limbs))
    }

    pub fn frac_limbs(&self) -> usize {
        self.frac_limbs
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    pub fn is_negative(&self) -> bool {
        self.neg
    }

    pub fn neg(&self) -> Self {
        let mut r = self.clone();
        r.neg = !r.neg && !r.is_zero();
        r
    }

    pub fn abs(&self) -> Self {
        let mut r = self.clone();
        r.neg = false;
        r
    }

    fn assert_compatible(&self, other: &Self) {
        assert_eq!(
            self.frac_limbs, other.frac_limbs,
            "mixed fixed-point widths"
        );
    }

    fn cmp_mag(&self, other: &Self) -> Ordering {
        for i in (0..self.limbs.len()).rev() {
            match self.limbs[i].cmp(&other.limbs[i]) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    fn add_mag(a: &[u64], b: &[u64], out: &mut [u64]) {
        let mut carry = 0u64;
        for i in 0..a.len() {
            let (s1, c1) = a[i].overflowing_add(b[i]);
            let (s2, c2) = s1.overflowing_add(carry);
            out[i] = s2;
            carry = (c1 as u64) + (c2 as u64);
        }
        assert_eq!(carry, 0, "fixed-point overflow in addition");
    }

    /// a − b assuming a ≥ b in magnitude.
    fn sub_mag(a: &[u64], b: &[u64], out: &mut [u64]) {
        let mut borrow = 0u64;
        for i in 0..a.len() {
            let (d1, b1) = a[i].overflowing_sub(b[i]);
            let (d2, b2) = d1.overflowing_sub(borrow);
            out[i] = d2;
            borrow = (b1 as u64) + (b2 as u64);
        }
        debug_assert_eq!(borrow, 0);
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let mut r = Self::zero(self.frac_limbs);
        if self.neg == other.neg {
            Self::add_mag(&self.limbs, &other.limbs, &mut r.limbs);
            r.neg = self.neg && !r.is_zero();
        } else {
            match self.cmp_mag(other) {
                Ordering::Equal => {}
                Ordering::Greater => {
                    Self::sub_mag(&self.limbs, &other.limbs, &mut r.limbs);
                    r.neg = self.neg && !r.is_zero();
                }
                Ordering::Less => {
                    Self::sub_mag(&other.limbs, &self.limbs, &mut r.limbs);
                    r.neg = other.neg && !r.is_zero();
                }
            }
        }
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Schoolbook product truncated toward zero at the fixed width.
    pub fn mul(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let n = self.limbs.len();
        let mut prod = vec![0u64; 2 * n];
        for i in 0..n {
            if self.limbs[i] == 0 {
                continue;
            }
            let mut carry = 0u128;
            for j in 0..n {
                let t = prod[i + j] as u128 + self.limbs[i] as u128 * other.limbs[j] as u128 + carry;
                prod[i + j] = t as u64;
                carry = t >> 64;
            }
            let mut k = i + n;
            while carry != 0 {
                let t = prod[k] as u128 + carry;
                prod[k] = t as u64;
                carry = t >> 64;
                k += 1;
            }
        }
        let f = self.frac_limbs;
        assert!(
            prod[f + n..].iter().all(|&l| l == 0),
            "fixed-point overflow in multiplication"
        );
        let mut r = Self::zero(f);
        r.limbs.copy_from_slice(&prod[f..f + n]);
        r.neg = (self.neg != other.neg) && !r.is_zero();
        r
    }

    pub fn mul_u64(&self, v: u64) -> Self {
        let mut r = Self::zero(self.frac_limbs);
        let mut carry = 0u128;
        for i in 0..self.limbs.len() {
            let t = self.limbs[i] as u128 * v as u128 + carry;
            r.limbs[i] = t as u64;
            carry = t >> 64;
        }
        assert_eq!(carry, 0, "fixed-point overflow in multiplication");
        r.neg = self.neg && !r.is_zero();
        r
    }

    /// Short division, truncated toward zero.
    pub fn div_u64(&self, d: u64) -> Self {
        assert!(d > 0, "division by zero");
        let mut r = Self::zero(self.frac_limbs);
        let mut rem = 0u128;
        for i in (0..self.limbs.len()).rev() {
            let cur = (rem << 64) | self.limbs[i] as u128;
            r.limbs[i] = (cur / d as u128) as u64;
            rem = cur % d as u128;
        }
        r.neg = self.neg && !r.is_zero();
        r
    }

    pub fn shr_bits(&self, k: u32) -> Self {
        let mut r = Self::zero(self.frac_limbs);
        let limb_shift = (k / 64) as usize;
        let bit_shift = k % 64;
        let n = self.limbs.len();
        for i in 0..n {
            let src = i + limb_shift;
            if src >= n {
                break;
            }
            let mut v = self.limbs[src] >> bit_shift;
            if bit_shift > 0 && src + 1 < n {
                v |= self.limbs[src + 1] << (64 - bit_shift);
            }
            r.limbs[i] = v;
        }
        r.neg = self.neg && !r.is_zero();
        r
    }

    /// Truncating decimal rendering with `digits` places after the point.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let f = self.frac_limbs;
        let int_part = ((self.limbs[f + 1] as u128) << 64) | self.limbs[f] as u128;
        let mut s = String::new();
        if self.neg {
            s.push('-');
        }
        s.push_str(&int_part.to_string());
        if digits == 0 {
            return s;
        }
        s.push('.');
        let mut frac = self.limbs[..f].to_vec();
        for _ in 0..digits {
            let mut carry = 0u128;
            for limb in frac.iter_mut() {
                let t = *limb as u128 * 10 + carry;
                *limb = t as u64;
                carry = t >> 64;
            }
            s.push(char::from(b'0' + carry as u8));
        }
        s
    }

    /// Lossy conversion for human-facing reporting only.
    pub fn to_f64(&self) -> f64 {
        let v = self.to_rational().to_f64().unwrap_or(f64::NAN);
        if self.neg {
            -v.abs()
        } else {
            v
        }
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        self.assert_compatible(other);
        match (self.neg, other.neg) {
            (false, true) => Ordering::Greater,
            (true, false) => Ordering::Less,
            (false, false) => self.cmp_mag(other),
            (true, true) => other.cmp_mag(self),
        }
    }
}
