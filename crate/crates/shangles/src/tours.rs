//! Tours: length-3 necklaces of distinct residues mod odd `n`.
//!
//! A tour `[p, q, r]` walks around `Z/nZ` in the increasing direction by
//! its three steps `q-p`, `r-q`, `p-r`, going around once or twice. Small
//! tours have all steps in `1..=(n-1)/2`; odd tours have all steps odd.
//! Multiplying residues by `-2` carries small tours bijectively onto odd
//! tours, with multiplication by `m = (n-1)/2` as its inverse.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TourError {
    #[error("tours need odd modulus n >= 3, got {0}")]
    BadModulus(usize),
    #[error("tour residues must be distinct mod {n}: ({p}, {q}, {r})")]
    NotDistinct { n: usize, p: i64, q: i64, r: i64 },
}

/// A tour in normal form: representatives in `1..=n`, least residue first,
/// cyclic order preserved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Tour {
    pub n: usize,
    pub normal: (usize, usize, usize),
}

/// The three steps of a tour, each in `1..=n-1`; they sum to `n` for a
/// once-around tour and `2n` for a twice-around one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StepTriple(pub usize, pub usize, pub usize);

impl StepTriple {
    pub fn sum(&self) -> usize {
        self.0 + self.1 + self.2
    }
}

fn check_modulus(n: usize) -> Result<(), TourError> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(TourError::BadModulus(n));
    }
    Ok(())
}

fn residue(n: usize, v: i64) -> usize {
    ((v - 1).rem_euclid(n as i64) + 1) as usize
}

/// Normal form of the tour `[p, q, r]`.
pub fn normal_form(n: usize, p: i64, q: i64, r: i64) -> Result<Tour, TourError> {
    check_modulus(n)?;
    let (a, b, c) = (residue(n, p), residue(n, q), residue(n, r));
    if a == b || b == c || a == c {
        return Err(TourError::NotDistinct { n, p, q, r });
    }
    let rotations = [(a, b, c), (b, c, a), (c, a, b)];
    let normal = rotations
        .into_iter()
        .find(|&(x, y, z)| x < y && x < z)
        .expect("distinct residues have a least element");
    Ok(Tour { n, normal })
}

impl Tour {
    pub fn steps(&self) -> StepTriple {
        let (i, j, k) = self.normal;
        let n = self.n as i64;
        let step = |from: usize, to: usize| ((to as i64 - from as i64).rem_euclid(n)) as usize;
        StepTriple(step(i, j), step(j, k), step(k, i))
    }

    /// All three steps in `1..=(n-1)/2`.
    pub fn is_small(&self) -> bool {
        let m = (self.n - 1) / 2;
        let StepTriple(a, b, c) = self.steps();
        a <= m && b <= m && c <= m
    }

    /// All three steps odd.
    pub fn is_odd(&self) -> bool {
        let StepTriple(a, b, c) = self.steps();
        a % 2 == 1 && b % 2 == 1 && c % 2 == 1
    }

    /// Steps sum to `n` rather than `2n`; equivalently `i < j < k` in the
    /// normal form `(i, j, k)`.
    pub fn is_once_around(&self) -> bool {
        let (i, j, k) = self.normal;
        i < j && j < k
    }

    /// Multiplies every residue by `-2` mod `n`.
    pub fn map_neg2(&self) -> Tour {
        let (i, j, k) = self.normal;
        normal_form(self.n, -2 * i as i64, -2 * j as i64, -2 * k as i64)
            .expect("scaling by a unit preserves distinctness")
    }

    /// Multiplies every residue by `m = (n-1)/2`, the inverse of `-2`.
    pub fn map_m(&self) -> Tour {
        let m = ((self.n - 1) / 2) as i64;
        let (i, j, k) = self.normal;
        normal_form(self.n, m * i as i64, m * j as i64, m * k as i64)
            .expect("scaling by a unit preserves distinctness")
    }
}

fn enumerate_filtered(n: usize, keep: impl Fn(&Tour) -> bool) -> Result<Vec<Tour>, TourError> {
    check_modulus(n)?;
    let mut tours = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                // Each 3-subset carries exactly two tours, one per cyclic
                // orientation: (i, j, k) once-around and (i, k, j).
                for normal in [(i, j, k), (i, k, j)] {
                    let tour = Tour { n, normal };
                    if keep(&tour) {
                        tours.push(tour);
                    }
                }
            }
        }
    }
    tours.sort();
    Ok(tours)
}

/// All small tours mod `n`, sorted by normal form.
pub fn enumerate_small(n: usize) -> Result<Vec<Tour>, TourError> {
    enumerate_filtered(n, Tour::is_small)
}

/// All odd tours mod `n`, sorted by normal form.
pub fn enumerate_odd(n: usize) -> Result<Vec<Tour>, TourError> {
    enumerate_filtered(n, Tour::is_odd)
}

/// `C(n+1, 3) / 4`, the common count of small and odd tours. The same
/// number counts the inscribed triangles of a regular n-gon containing
/// its center: each unordered vertex triple carries two tours, and the
/// triangle contains the center exactly when one of them is small.
pub fn tour_count(n: usize) -> u64 {
    let n = n as u64;
    (n + 1) * n * (n - 1) / 6 / 4
}
