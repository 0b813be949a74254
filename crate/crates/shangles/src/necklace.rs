//! Exact-rational shangle/length necklaces and their weight-balance predicates.
//!
//! Everything in this module is exact: entries are arbitrary-precision
//! rationals and every comparison against the half-weight `S/2` is decided
//! by integer arithmetic, never by floating point. Indices are cyclic and
//! 1-based (`s_1` through `s_n`), matching the usual necklace labeling;
//! an index `k` outside `1..=n` denotes `k mod n`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

/// Exact rational scalar: arbitrary-precision numerator and positive
/// denominator, always in lowest terms.
pub type Rational = num_rational::BigRational;

/// Default cap on the necklace length for operations that enumerate
/// exponentially many subsets.
pub const DEFAULT_SUBSET_CAP: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NecklaceError {
    #[error("invalid necklace token {token:?}: {reason}")]
    Parse { token: String, reason: String },
    #[error("necklace needs at least 3 entries, got {0}")]
    TooShort(usize),
    #[error("necklace entry {index} is not strictly positive")]
    NonPositiveEntry { index: usize },
    #[error("substring length {len} of {n} cannot be classified (must be 1..=n-1)")]
    UnclassifiableLength { len: usize, n: usize },
    #[error("diametral substrings require even length, necklace has n = {0}")]
    OddLength(usize),
    #[error("necklace length {n} exceeds enumeration cap {cap}")]
    CapExceeded { n: usize, cap: usize },
}

/// Whether a substring weighs less than, exactly, or more than `S/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Balance {
    Light,
    Tied,
    Heavy,
}

/// A consecutive cyclic substring: `len` entries starting at `start`.
///
/// `len = 0` is the empty substring and `len = n` the whole necklace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Substring {
    /// 1-based canonical start label.
    pub start: usize,
    /// Number of entries covered, in `0..=n`.
    pub len: usize,
}

impl Substring {
    pub fn new(start: usize, len: usize) -> Self {
        Substring { start, len }
    }
}

/// A substring tie: a consecutive substring of weight exactly `S/2`.
///
/// The stored substring is the shorter of the complementary pair (the one
/// of lexicographically least start if both have length `n/2`), and the
/// width is its length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TieRecord {
    pub substring: Substring,
    pub width: usize,
}

/// A subset tie: a not-necessarily-consecutive index set whose entries sum
/// to exactly `S/2`, keyed by the side that does not contain index 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubsetTie {
    /// Sorted 1-based member labels of the keyed side.
    pub subset: Vec<usize>,
    /// `min(|subset|, n - |subset|)`.
    pub width: usize,
    /// `(width - 1, n - width - 1)`, the signature of the quadratic
    /// singular point this tie induces in the fixed-lengths moduli space.
    pub signature: (usize, usize),
    /// `width! * (n - width)!`, the number of cyclic reorderings that turn
    /// both tied subsets into consecutive substrings.
    pub reorder_count: u128,
}

/// A cyclic sequence of `n >= 3` strictly positive rationals with its total
/// weight cached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Necklace {
    entries: Vec<Rational>,
    total: Rational,
}

impl Necklace {
    pub fn new(entries: Vec<Rational>) -> Result<Self, NecklaceError> {
        if entries.len() < 3 {
            return Err(NecklaceError::TooShort(entries.len()));
        }
        for (i, e) in entries.iter().enumerate() {
            if !e.is_positive() {
                return Err(NecklaceError::NonPositiveEntry { index: i + 1 });
            }
        }
        let total = entries.iter().sum();
        Ok(Necklace { entries, total })
    }

    /// Convenience constructor from integer entries.
    pub fn from_ints(entries: &[i64]) -> Result<Self, NecklaceError> {
        Self::new(entries.iter().map(|&v| Rational::from_integer(v.into())).collect())
    }

    /// Parses the comma-separated text form, each entry `int` or `int/int`.
    /// Whitespace around commas is ignored.
    pub fn parse(text: &str) -> Result<Self, NecklaceError> {
        let mut entries = Vec::new();
        for raw in text.split(',') {
            entries.push(parse_rational_token(raw)?);
        }
        Self::new(entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    /// Total weight `S`.
    pub fn total(&self) -> &Rational {
        &self.total
    }

    /// Exact half weight `S/2`.
    pub fn half_total(&self) -> Rational {
        &self.total / Rational::from_integer(2.into())
    }

    /// Canonical 1-based label of an arbitrary cyclic index.
    pub fn label(&self, k: i64) -> usize {
        let n = self.len() as i64;
        ((k - 1).rem_euclid(n) + 1) as usize
    }

    /// Entry at a cyclic index (`entry(0)` is `s_n`, `entry(n + 1)` is `s_1`).
    pub fn entry(&self, k: i64) -> &Rational {
        &self.entries[self.label(k) - 1]
    }

    /// Rotates the necklace so that former label `r + 1` becomes label 1.
    pub fn rotated(&self, r: usize) -> Necklace {
        let n = self.len();
        let entries = (0..n).map(|i| self.entries[(i + r) % n].clone()).collect();
        Necklace { entries, total: self.total.clone() }
    }

    /// Reverses the cyclic order, keeping label 1 in place.
    pub fn reversed(&self) -> Necklace {
        let n = self.len();
        let entries = (0..n).map(|i| self.entries[(n - i) % n].clone()).collect();
        Necklace { entries, total: self.total.clone() }
    }

    /// Substring complementary to `sub`.
    pub fn complement(&self, sub: Substring) -> Substring {
        Substring {
            start: self.label(sub.start as i64 + sub.len as i64),
            len: self.len() - sub.len,
        }
    }

    /// Exact weight of a cyclic substring; the empty substring weighs zero.
    pub fn weight(&self, sub: Substring) -> Rational {
        let mut acc = Rational::zero();
        for i in 0..sub.len {
            acc += self.entry(sub.start as i64 + i as i64);
        }
        acc
    }

    /// Classifies a proper substring as light, tied, or heavy against `S/2`.
    pub fn classify_substring(&self, sub: Substring) -> Result<Balance, NecklaceError> {
        let n = self.len();
        if sub.len == 0 || sub.len >= n {
            return Err(NecklaceError::UnclassifiableLength { len: sub.len, n });
        }
        Ok(self.balance_of_weight(&self.weight(sub)))
    }

    /// Balance of an arbitrary weight against `S/2` (`2w` vs `S`, exactly).
    pub fn balance_of_weight(&self, w: &Rational) -> Balance {
        match (w + w).cmp(&self.total) {
            Ordering::Less => Balance::Light,
            Ordering::Equal => Balance::Tied,
            Ordering::Greater => Balance::Heavy,
        }
    }

    /// All substring ties, one record per complementary pair, sorted by
    /// `(width, start)`.
    pub fn substring_ties(&self) -> Vec<TieRecord> {
        let n = self.len();
        let (scaled, total) = self.scaled_integer_entries();
        let mut ties = Vec::new();
        for len in 1..=n / 2 {
            // A diametral pair is seen from both sides; keep the start in
            // the first half so each pair is reported once.
            let starts = if 2 * len == n { 1..=n / 2 } else { 1..=n };
            for start in starts {
                let mut sum = BigInt::zero();
                for i in 0..len {
                    sum += &scaled[(start - 1 + i) % n];
                }
                if &sum * 2 == total {
                    ties.push(TieRecord { substring: Substring::new(start, len), width: len });
                }
            }
        }
        ties
    }

    /// True when every substring shorter than `n/2` is light (equivalently,
    /// every substring longer than `n/2` is heavy).
    pub fn is_majority_dominant(&self) -> bool {
        let n = self.len();
        let (scaled, total) = self.scaled_integer_entries();
        for len in 1..=(n - 1) / 2 {
            for start in 0..n {
                let mut sum = BigInt::zero();
                for i in 0..len {
                    sum += &scaled[(start + i) % n];
                }
                if &sum * 2 >= total {
                    return false;
                }
            }
        }
        true
    }

    /// Dipole tie-breaking for even `n`: succeeds when no diametral
    /// substring is tied and the heavy diametral substrings are exactly the
    /// `n/2` containing one pole. Returns `(light_pole, heavy_pole)` with
    /// the lexicographically least valid light pole, or `None`.
    pub fn dipole_tie_breaking(&self) -> Result<Option<(usize, usize)>, NecklaceError> {
        let n = self.len();
        if !n.is_multiple_of(2) {
            return Err(NecklaceError::OddLength(n));
        }
        let half = n / 2;
        let (scaled, total) = self.scaled_integer_entries();
        // balance[b] for the diametral substring starting at label b+1.
        let mut balance = Vec::with_capacity(n);
        for start in 0..n {
            let mut sum = BigInt::zero();
            for i in 0..half {
                sum += &scaled[(start + i) % n];
            }
            match (&sum * 2i32).cmp(&total) {
                Ordering::Less => balance.push(Balance::Light),
                Ordering::Equal => return Ok(None),
                Ordering::Greater => balance.push(Balance::Heavy),
            }
        }
        'pole: for p in 0..n {
            // Diametral substrings containing label p+1 start at p-half+1..=p.
            for back in 0..half {
                let b = (p + n - back) % n;
                if balance[b] != Balance::Light {
                    continue 'pole;
                }
            }
            let heavy = (p + half) % n;
            debug_assert!((0..half).all(|back| balance[(heavy + n - back) % n] == Balance::Heavy));
            return Ok(Some((p + 1, heavy + 1)));
        }
        Ok(None)
    }

    /// All subset ties, keyed by the side not containing label 1, sorted by
    /// `(width, subset)`. Enumerates `2^(n-1)` subsets, so `n` is capped.
    pub fn subset_ties(&self, cap: usize) -> Result<Vec<SubsetTie>, NecklaceError> {
        let n = self.len();
        if n > cap {
            return Err(NecklaceError::CapExceeded { n, cap });
        }
        let (scaled, total) = self.scaled_integer_entries();
        let mut ties = Vec::new();
        // Bit i of the mask stands for label i + 2 (label 1 is always left out).
        for mask in 1u32..(1 << (n - 1)) {
            let mut sum = BigInt::zero();
            for i in 0..n - 1 {
                if mask >> i & 1 == 1 {
                    sum += &scaled[i + 1];
                }
            }
            if &sum * 2 == total {
                let subset: Vec<usize> =
                    (0..n - 1).filter(|i| mask >> i & 1 == 1).map(|i| i + 2).collect();
                let width = subset.len().min(n - subset.len());
                ties.push(SubsetTie {
                    width,
                    signature: (width - 1, n - width - 1),
                    reorder_count: factorial_u128(width) * factorial_u128(n - width),
                    subset,
                });
            }
        }
        ties.sort_by(|a, b| (a.width, &a.subset).cmp(&(b.width, &b.subset)));
        Ok(ties)
    }

    /// Entries rescaled to integers by the least common denominator,
    /// together with the rescaled total.
    pub(crate) fn scaled_integer_entries(&self) -> (Vec<BigInt>, BigInt) {
        let mut lcm = BigInt::one();
        for e in &self.entries {
            lcm = lcm.lcm(e.denom());
        }
        let scaled: Vec<BigInt> =
            self.entries.iter().map(|e| e.numer() * (&lcm / e.denom())).collect();
        let total = scaled.iter().sum();
        (scaled, total)
    }
}

impl fmt::Display for Necklace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(format_rational).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Formats a rational as `int` or `int/int`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses one `int` or `int/int` token.
pub fn parse_rational_token(raw: &str) -> Result<Rational, NecklaceError> {
    let token = raw.trim();
    let fail = |reason: &str| NecklaceError::Parse {
        token: token.to_string(),
        reason: reason.to_string(),
    };
    if token.is_empty() {
        return Err(fail("empty token"));
    }
    let (numer, denom) = match token.split_once('/') {
        Some((num, den)) => (num, Some(den)),
        None => (token, None),
    };
    let numer: BigInt = numer.parse().map_err(|_| fail("numerator is not an integer"))?;
    let denom: BigInt = match denom {
        Some(d) => d.parse().map_err(|_| fail("denominator is not an integer"))?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(fail("denominator is zero"));
    }
    Ok(Rational::new(numer, denom))
}

fn factorial_u128(k: usize) -> u128 {
    (1..=k as u128).product::<u128>().max(1)
}
