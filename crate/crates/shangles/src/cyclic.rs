//! Cyclic polytopes `C_d(m)` and their face lattices.
//!
//! Facets come from Gale's evenness condition: a size-`d` subset `F` of the
//! `m` moment-curve labels is a facet exactly when every two labels outside
//! `F` have an even number of members of `F` strictly between them. An
//! independent oracle confirms each facet list by exact big-integer
//! orientation determinants on actual moment-curve points, with no
//! floating point and no thresholds.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CyclicError {
    #[error("cyclic polytope needs 1 <= d < m <= 32, got d = {d}, m = {m}")]
    BadParameters { d: usize, m: usize },
    #[error("moment oracle limited to d <= {max_d}, m <= {max_m} (got d = {d}, m = {m})")]
    OracleTooLarge { d: usize, m: usize, max_d: usize, max_m: usize },
    #[error("moment-curve parameters must be strictly increasing")]
    NonIncreasingParameters,
    #[error("expected {1} moment-curve parameters, got {0}")]
    WrongParameterCount(usize, usize),
    #[error("vertex label {label} outside 1..={m}")]
    LabelOutOfRange { label: usize, m: usize },
    #[error("internal error: zero orientation determinant on distinct moment-curve points")]
    DegenerateDeterminant,
}

const ORACLE_MAX_D: usize = 8;
const ORACLE_MAX_M: usize = 14;

/// A set of vertex labels in `1..=m`, sorted.
pub type VertexSet = Vec<usize>;

/// A simplicial face lattice: every face is a subset of some facet.
///
/// Cyclic polytopes are simplicial, so `face_lattice` produces one of
/// these; vertex figures of simplicial polytopes are simplicial again and
/// reuse the same representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialLattice {
    /// Facet cardinality (the polytope dimension).
    rank: usize,
    /// Number of vertex labels.
    m: usize,
    facets: Vec<VertexSet>,
    /// Every nonempty face, as label bitmasks (bit `i` is label `i + 1`).
    faces: BTreeSet<u32>,
    fvector: Vec<usize>,
}

/// Lattice of a cyclic polytope `C_d(m)`; `rank() = d`.
pub type CyclicLattice = SimplicialLattice;

pub(crate) fn mask_of(labels: &[usize]) -> u32 {
    labels.iter().fold(0u32, |acc, &l| acc | 1 << (l - 1))
}

pub(crate) fn labels_of(mask: u32) -> VertexSet {
    (0..32).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

impl SimplicialLattice {
    /// Downward closure of a facet list over labels `1..=m`.
    pub fn from_facets(m: usize, rank: usize, facets: Vec<VertexSet>) -> Self {
        let mut faces = BTreeSet::new();
        for facet in &facets {
            let full = mask_of(facet);
            // All nonzero submasks of the facet.
            let mut sub = full;
            while sub != 0 {
                faces.insert(sub);
                sub = (sub - 1) & full;
            }
        }
        let mut fvector = vec![0usize; rank];
        for mask in &faces {
            fvector[mask.count_ones() as usize - 1] += 1;
        }
        SimplicialLattice { rank, m, facets, faces, fvector }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn facets(&self) -> &[VertexSet] {
        &self.facets
    }

    /// Number of nonempty faces.
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Counts of faces by dimension `(f_0, ..., f_{rank-1})`.
    pub fn fvector(&self) -> &[usize] {
        &self.fvector
    }

    pub fn is_face(&self, labels: &[usize]) -> bool {
        !labels.is_empty() && self.faces.contains(&mask_of(labels))
    }

    pub(crate) fn face_masks(&self) -> &BTreeSet<u32> {
        &self.faces
    }

    pub fn faces(&self) -> impl Iterator<Item = VertexSet> + '_ {
        self.faces.iter().map(|&mask| labels_of(mask))
    }

    /// Documented JSON form, mirroring the fixed-angles lattice schema with
    /// `labels` in place of `zeros`: `{"faces": [{"dim", "labels"}...],
    /// "fvector": [...], "n": m}`.
    pub fn to_json_string(&self) -> String {
        #[derive(Serialize)]
        struct FaceJson {
            dim: usize,
            labels: Vec<usize>,
        }
        #[derive(Serialize)]
        struct LatticeJson {
            faces: Vec<FaceJson>,
            fvector: Vec<usize>,
            n: usize,
        }
        let mut faces: Vec<FaceJson> = self
            .faces
            .iter()
            .map(|&mask| FaceJson { dim: mask.count_ones() as usize - 1, labels: labels_of(mask) })
            .collect();
        faces.sort_by_key(|a| (a.dim, a.labels.clone()));
        let json = LatticeJson { faces, fvector: self.fvector.clone(), n: self.m };
        serde_json::to_string(&json).expect("lattice serialization cannot fail")
    }
}

fn check_parameters(d: usize, m: usize) -> Result<(), CyclicError> {
    if d < 1 || d >= m || m > 32 {
        return Err(CyclicError::BadParameters { d, m });
    }
    Ok(())
}

/// Facets of `C_d(m)` by Gale's evenness condition, sorted.
pub fn gale_facets(d: usize, m: usize) -> Result<Vec<VertexSet>, CyclicError> {
    check_parameters(d, m)?;
    let mut facets = Vec::new();
    let mut subset: Vec<usize> = (1..=d).collect();
    loop {
        if gale_even(&subset, m) {
            facets.push(subset.clone());
        }
        if !next_combination(&mut subset, d, m) {
            break;
        }
    }
    Ok(facets)
}

fn next_combination(subset: &mut [usize], d: usize, m: usize) -> bool {
    let mut i = d;
    while i > 0 {
        i -= 1;
        if subset[i] < m - (d - 1 - i) {
            subset[i] += 1;
            for j in i + 1..d {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Evenness test: between every two consecutive non-members, the number of
/// members is even (pairwise evenness follows by summing gaps).
fn gale_even(subset: &[usize], m: usize) -> bool {
    let members: BTreeSet<usize> = subset.iter().copied().collect();
    let mut prev_gap: Option<usize> = None;
    for label in 1..=m {
        if members.contains(&label) {
            continue;
        }
        if let Some(prev) = prev_gap {
            let between = subset.iter().filter(|&&f| prev < f && f < label).count();
            if between % 2 != 0 {
                return false;
            }
        }
        prev_gap = Some(label);
    }
    true
}

/// Facets of `C_d(m)` by exact orientation determinants on the points
/// `(t_i, t_i^2, ..., t_i^d)`: a size-`d` subset is a facet when every
/// other point lies strictly on one common side of its affine hull.
/// `params` defaults to `t_i = i`.
pub fn moment_oracle_facets(
    d: usize,
    m: usize,
    params: Option<&[i64]>,
) -> Result<Vec<VertexSet>, CyclicError> {
    check_parameters(d, m)?;
    if d > ORACLE_MAX_D || m > ORACLE_MAX_M {
        return Err(CyclicError::OracleTooLarge {
            d,
            m,
            max_d: ORACLE_MAX_D,
            max_m: ORACLE_MAX_M,
        });
    }
    let default: Vec<i64> = (1..=m as i64).collect();
    let t = match params {
        Some(t) => {
            if t.len() != m {
                return Err(CyclicError::WrongParameterCount(t.len(), m));
            }
            if t.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CyclicError::NonIncreasingParameters);
            }
            t.to_vec()
        }
        None => default,
    };
    // points[i] = [1, t, t^2, ..., t^d] for label i + 1.
    let points: Vec<Vec<BigInt>> = t
        .iter()
        .map(|&ti| {
            let mut row = Vec::with_capacity(d + 1);
            let mut p = BigInt::one();
            row.push(p.clone());
            for _ in 0..d {
                p *= ti;
                row.push(p.clone());
            }
            row
        })
        .collect();

    let mut facets = Vec::new();
    let mut subset: Vec<usize> = (1..=d).collect();
    loop {
        if oracle_is_facet(&points, &subset, m)? {
            facets.push(subset.clone());
        }
        if !next_combination(&mut subset, d, m) {
            break;
        }
    }
    Ok(facets)
}

fn oracle_is_facet(
    points: &[Vec<BigInt>],
    subset: &[usize],
    m: usize,
) -> Result<bool, CyclicError> {
    let mut side = 0i8;
    for test in 1..=m {
        if subset.contains(&test) {
            continue;
        }
        let mut rows: Vec<Vec<BigInt>> = subset.iter().map(|&l| points[l - 1].clone()).collect();
        rows.push(points[test - 1].clone());
        let sign = determinant_sign(rows);
        if sign == 0 {
            return Err(CyclicError::DegenerateDeterminant);
        }
        if side == 0 {
            side = sign;
        } else if side != sign {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sign of an exact integer determinant via fraction-free (Bareiss)
/// elimination.
fn determinant_sign(mut mat: Vec<Vec<BigInt>>) -> i8 {
    let n = mat.len();
    let mut sign = 1i8;
    let mut prev = BigInt::one();
    for k in 0..n {
        if mat[k][k].is_zero() {
            match (k + 1..n).find(|&r| !mat[r][k].is_zero()) {
                Some(r) => {
                    mat.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &mat[i][j] * &mat[k][k] - &mat[i][k] * &mat[k][j];
                mat[i][j] = num / &prev;
            }
            mat[i][k] = BigInt::zero();
        }
        prev = mat[k][k].clone();
    }
    if mat[n - 1][n - 1].is_positive() {
        sign
    } else if mat[n - 1][n - 1].is_negative() {
        -sign
    } else {
        0
    }
}

/// Full face lattice of `C_d(m)`: the downward closure of the Gale facets.
pub fn face_lattice(d: usize, m: usize) -> Result<CyclicLattice, CyclicError> {
    let facets = gale_facets(d, m)?;
    Ok(SimplicialLattice::from_facets(m, d, facets))
}

/// True when every set of at most `d/2` vertices is a face.
pub fn is_neighborly(d: usize, m: usize) -> Result<bool, CyclicError> {
    let lattice = face_lattice(d, m)?;
    let k = d / 2;
    if k == 0 {
        return Ok(true);
    }
    let mut subset: Vec<usize> = (1..=k).collect();
    loop {
        if !lattice.is_face(&subset) {
            return Ok(false);
        }
        if !next_combination(&mut subset, k, m) {
            break;
        }
    }
    Ok(true)
}

/// Entrywise comparison of a candidate dual f-vector against `C_d(m)`:
/// the candidate is max-faced exactly when they agree everywhere.
pub fn max_faced_check(
    lattice: &crate::fixed_angles::FaceLattice,
    d: usize,
    m: usize,
) -> Result<bool, CyclicError> {
    let cyclic = face_lattice(d, m)?;
    // Dual f-vector: reverse the proper-face counts.
    let mut dual: Vec<usize> = lattice.fvector().to_vec();
    dual.reverse();
    Ok(dual == cyclic.fvector())
}

/// Vertex figure of vertex `v`: facets through `v` with `v` deleted,
/// relabeled order-preservingly onto `1..=m-1`.
pub fn vertex_figure_lattice(
    d: usize,
    m: usize,
    v: usize,
) -> Result<SimplicialLattice, CyclicError> {
    if v < 1 || v > m {
        return Err(CyclicError::LabelOutOfRange { label: v, m });
    }
    let facets = gale_facets(d, m)?;
    let figure_facets: Vec<VertexSet> = facets
        .iter()
        .filter(|f| f.contains(&v))
        .map(|f| {
            f.iter().filter(|&&l| l != v).map(|&l| if l > v { l - 1 } else { l }).collect()
        })
        .collect();
    Ok(SimplicialLattice::from_facets(m - 1, d - 1, figure_facets))
}

/// Searches for a label bijection identifying two simplicial lattices,
/// returning the lexicographically least witness (as images of labels
/// `1..=m`) if one exists.
pub fn simplicial_isomorphism(a: &SimplicialLattice, b: &SimplicialLattice) -> Option<Vec<usize>> {
    if a.m != b.m || a.rank != b.rank || a.facets.len() != b.facets.len() {
        return None;
    }
    if a.fvector != b.fvector {
        return None;
    }
    let m = a.m;
    let deg =
        |lat: &SimplicialLattice, l: usize| lat.facets.iter().filter(|f| f.contains(&l)).count();
    let deg_a: Vec<usize> = (1..=m).map(|l| deg(a, l)).collect();
    let deg_b: Vec<usize> = (1..=m).map(|l| deg(b, l)).collect();
    let b_facets: BTreeSet<u32> = b.facets.iter().map(|f| mask_of(f)).collect();

    struct Search<'s> {
        a: &'s SimplicialLattice,
        b: &'s SimplicialLattice,
        deg_a: &'s [usize],
        deg_b: &'s [usize],
        b_facets: &'s BTreeSet<u32>,
        image: Vec<usize>,
        used: Vec<bool>,
    }

    impl Search<'_> {
        fn pair(lat: &SimplicialLattice, x: usize, y: usize) -> usize {
            lat.facets.iter().filter(|f| f.contains(&x) && f.contains(&y)).count()
        }

        fn assign(&mut self, next: usize) -> bool {
            let m = self.a.m;
            if next > m {
                return self.a.facets.iter().all(|f| {
                    let mapped: Vec<usize> = f.iter().map(|&l| self.image[l - 1]).collect();
                    self.b_facets.contains(&mask_of(&mapped))
                });
            }
            for cand in 1..=m {
                if self.used[cand - 1] || self.deg_a[next - 1] != self.deg_b[cand - 1] {
                    continue;
                }
                if (1..next).any(|prev| {
                    Self::pair(self.a, next, prev)
                        != Self::pair(self.b, cand, self.image[prev - 1])
                }) {
                    continue;
                }
                self.image[next - 1] = cand;
                self.used[cand - 1] = true;
                if self.assign(next + 1) {
                    return true;
                }
                self.used[cand - 1] = false;
            }
            false
        }
    }

    let mut search = Search {
        a,
        b,
        deg_a: &deg_a,
        deg_b: &deg_b,
        b_facets: &b_facets,
        image: vec![0usize; m],
        used: vec![false; m],
    };
    if search.assign(1) {
        Some(search.image)
    } else {
        None
    }
}
