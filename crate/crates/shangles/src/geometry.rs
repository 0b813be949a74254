//! Floating-point realizations of fixed-angles polygons.
//!
//! The heading of edge `e_1` is pinned to zero and the turn at vertex `k`
//! (external angle `2*pi*s_k/S`) is applied between edges `e_k` and
//! `e_{k+1}`; edge `e_k` runs from vertex `v_{k-1}` to `v_k`. On top of
//! that convention this module builds tangential interior witnesses,
//! realizations of trigon and digon vertices, polygon areas, and the
//! signature of the area form restricted to the closure subspace.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::Serialize;
use thiserror::Error;

use crate::fixed_angles::{self, Face, FaceKind, FixedAnglesError, MergedNecklace, ZeroSet};
use crate::necklace::{Necklace, Rational, Substring};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("necklace entry {index} is at least S/2; no tangential polygon exists")]
    TanSingularity { index: usize },
    #[error("face {0:?} is not a vertex")]
    NotAVertex(Vec<usize>),
    #[error("singular linear system for trigon gap lengths")]
    SingularTriangleSystem,
    #[error("trigon gap length {length:.3e} is not positive")]
    NonPositiveGapLength { length: f64 },
    #[error("closure residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    ClosureResidual { residual: f64, tolerance: f64 },
    #[error("area form eigenvalue {eigenvalue:.3e} within threshold {threshold:.3e} of zero")]
    DegenerateAreaForm { eigenvalue: f64, threshold: f64 },
    #[error("closure matrix rank {rank} != 2")]
    DegenerateClosureMatrix { rank: usize },
    #[error(transparent)]
    FixedAngles(#[from] FixedAnglesError),
}

/// Centralized relative tolerances for every numeric verdict.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// For residuals of freshly constructed realizations.
    pub construction: f64,
    /// For feasibility verdicts on realizations.
    pub feasibility: f64,
    /// For spectral decisions (signature counts, rank).
    pub spectral: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { construction: 1e-12, feasibility: 1e-9, spectral: 1e-9 }
    }
}

/// Edge headings of the fixed-angles polygon: `phi_1 = 0` and
/// `phi_{k+1} = phi_k + 2*pi*s_k/S`.
#[derive(Debug, Clone)]
pub struct AngleSystem {
    headings: Vec<f64>,
    total_turn: f64,
}

impl AngleSystem {
    pub fn new(s: &Necklace) -> Self {
        let n = s.len();
        let total = rational_to_f64(s.total());
        let mut headings = Vec::with_capacity(n);
        let mut phi = 0.0;
        for k in 1..=n {
            headings.push(phi);
            phi += 2.0 * PI * rational_to_f64(s.entry(k as i64)) / total;
        }
        AngleSystem { headings, total_turn: phi }
    }

    pub fn n(&self) -> usize {
        self.headings.len()
    }

    /// Heading of edge `e_k`, 1-based.
    pub fn heading(&self, k: usize) -> f64 {
        self.headings[k - 1]
    }

    pub fn headings(&self) -> &[f64] {
        &self.headings
    }

    /// Total turn over all vertices; `2*pi` up to rounding.
    pub fn total_turn(&self) -> f64 {
        self.total_turn
    }

    pub fn unit(&self, k: usize) -> (f64, f64) {
        let phi = self.heading(k);
        (phi.cos(), phi.sin())
    }
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().expect("rational magnitudes here fit in f64")
}

/// A concrete polygon: edge lengths, headings, and the vertex chain
/// `v_k = v_{k-1} + l_k * (cos phi_k, sin phi_k)` starting at the origin.
/// Serializes with sorted keys for plotting pipelines.
#[derive(Debug, Clone, Serialize)]
pub struct PolygonRealization {
    pub headings: Vec<f64>,
    pub lengths: Vec<f64>,
    pub vertices: Vec<(f64, f64)>,
}

impl PolygonRealization {
    pub fn from_lengths(angles: &AngleSystem, lengths: Vec<f64>) -> Self {
        let n = angles.n();
        assert_eq!(lengths.len(), n, "one length per edge");
        let mut vertices = Vec::with_capacity(n);
        let (mut x, mut y) = (0.0f64, 0.0f64);
        for k in 1..=n {
            let (c, s) = angles.unit(k);
            x += lengths[k - 1] * c;
            y += lengths[k - 1] * s;
            vertices.push((x, y));
        }
        PolygonRealization { headings: angles.headings().to_vec(), lengths, vertices }
    }

    pub fn n(&self) -> usize {
        self.lengths.len()
    }

    pub fn perimeter(&self) -> f64 {
        self.lengths.iter().sum()
    }

    /// `|sum_k l_k e^{i phi_k}|`, i.e. how far the chain misses closing.
    pub fn closure_residual(&self) -> f64 {
        let (x, y) = *self.vertices.last().expect("realizations are nonempty");
        x.hypot(y)
    }

    /// Signed shoelace area (counterclockwise positive).
    pub fn area(&self) -> f64 {
        let n = self.n();
        let mut twice = 0.0;
        for k in 0..n {
            let (x0, y0) = if k == 0 { self.vertices[n - 1] } else { self.vertices[k - 1] };
            let (x1, y1) = self.vertices[k];
            twice += x0 * y1 - x1 * y0;
        }
        twice / 2.0
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("realization serialization cannot fail")
    }
}

/// An interior point of the polytope: the unit-perimeter polygon whose
/// edges are all tangent to one inscribed circle. The edge between
/// vertices with shangles `p` and `q` has length proportional to
/// `tan(pi*p/S) + tan(pi*q/S)`.
pub fn tangential_polygon(s: &Necklace) -> Result<PolygonRealization, GeometryError> {
    tangential_with(s, Tolerances::default())
}

fn tangential_with(s: &Necklace, tol: Tolerances) -> Result<PolygonRealization, GeometryError> {
    let n = s.len();
    let half = s.half_total();
    for k in 1..=n {
        if *s.entry(k as i64) >= half {
            return Err(GeometryError::TanSingularity { index: k });
        }
    }
    let total = rational_to_f64(s.total());
    let mut lengths = Vec::with_capacity(n);
    for k in 1..=n {
        let prev = rational_to_f64(s.entry(k as i64 - 1));
        let here = rational_to_f64(s.entry(k as i64));
        lengths.push((PI * prev / total).tan() + (PI * here / total).tan());
    }
    let perimeter: f64 = lengths.iter().sum();
    for l in &mut lengths {
        *l /= perimeter;
    }
    let realization = PolygonRealization::from_lengths(&AngleSystem::new(s), lengths);
    let residual = realization.closure_residual();
    if residual > tol.construction {
        return Err(GeometryError::ClosureResidual { residual, tolerance: tol.construction });
    }
    Ok(realization)
}

/// Unit-perimeter realization of a vertex of the polytope: the gap edges
/// of a trigon vertex take the unique positive triangle lengths, the two
/// gap edges of a digon vertex take length 1/2 each.
pub fn vertex_realization(s: &Necklace, v: &Face) -> Result<PolygonRealization, GeometryError> {
    if v.dim != 0 {
        return Err(GeometryError::NotAVertex(v.closed_zero_set.to_vec()));
    }
    let n = s.len();
    let angles = AngleSystem::new(s);
    let gaps: Vec<usize> = (1..=n).filter(|&e| !v.closed_zero_set.contains(e)).collect();
    let mut lengths = vec![0.0f64; n];
    match v.kind {
        FaceKind::DigonVertex => {
            if gaps.len() != 2 {
                return Err(GeometryError::NotAVertex(v.closed_zero_set.to_vec()));
            }
            lengths[gaps[0] - 1] = 0.5;
            lengths[gaps[1] - 1] = 0.5;
        }
        FaceKind::TrigonVertex => {
            if gaps.len() != 3 {
                return Err(GeometryError::NotAVertex(v.closed_zero_set.to_vec()));
            }
            let (c1, s1) = angles.unit(gaps[0]);
            let (c2, s2) = angles.unit(gaps[1]);
            let (c3, s3) = angles.unit(gaps[2]);
            let system = Matrix3::new(c1, c2, c3, s1, s2, s3, 1.0, 1.0, 1.0);
            let rhs = Vector3::new(0.0, 0.0, 1.0);
            let solution =
                system.lu().solve(&rhs).ok_or(GeometryError::SingularTriangleSystem)?;
            for (gap, &length) in gaps.iter().zip(solution.iter()) {
                if length <= 0.0 {
                    return Err(GeometryError::NonPositiveGapLength { length });
                }
                lengths[gap - 1] = length;
            }
        }
        FaceKind::Generic => return Err(GeometryError::NotAVertex(v.closed_zero_set.to_vec())),
    }
    let realization = PolygonRealization::from_lengths(&angles, lengths);
    let tol = Tolerances::default();
    let residual = realization.closure_residual();
    if residual > tol.feasibility {
        return Err(GeometryError::ClosureResidual { residual, tolerance: tol.feasibility });
    }
    Ok(realization)
}

/// The 2 x n matrix whose columns are the edge heading unit vectors; its
/// kernel is the closure subspace of length vectors.
pub fn closure_matrix(s: &Necklace) -> DMatrix<f64> {
    let angles = AngleSystem::new(s);
    let n = angles.n();
    DMatrix::from_fn(2, n, |row, col| {
        let (c, si) = angles.unit(col + 1);
        if row == 0 {
            c
        } else {
            si
        }
    })
}

/// Rank of the closure matrix by singular values against a relative
/// threshold.
pub fn closure_matrix_rank(s: &Necklace, tol: &Tolerances) -> usize {
    let svd = closure_matrix(s).svd(false, false);
    let max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    svd.singular_values.iter().filter(|&&sv| sv > tol.spectral * max).count()
}

/// Orthonormal basis of the kernel of the closure matrix, as columns of an
/// `n x (n-2)` matrix, built by Gram-Schmidt against the closure rows.
fn closure_kernel_basis(s: &Necklace) -> Result<DMatrix<f64>, GeometryError> {
    let matrix = closure_matrix(s);
    let n = matrix.ncols();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut pinned: Vec<Vec<f64>> = Vec::new();
    for row in 0..2 {
        let mut v: Vec<f64> = (0..n).map(|c| matrix[(row, c)]).collect();
        for p in &pinned {
            let dot: f64 = v.iter().zip(p).map(|(a, b)| a * b).sum();
            for (vi, pi) in v.iter_mut().zip(p) {
                *vi -= dot * pi;
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= 1e-12 {
            return Err(GeometryError::DegenerateClosureMatrix { rank: row });
        }
        for vi in &mut v {
            *vi /= norm;
        }
        pinned.push(v);
    }
    for i in 0..n {
        let mut v = vec![0.0f64; n];
        v[i] = 1.0;
        for p in pinned.iter().chain(basis.iter()) {
            let dot: f64 = v.iter().zip(p).map(|(a, b)| a * b).sum();
            for (vi, pi) in v.iter_mut().zip(p) {
                *vi -= dot * pi;
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-9 {
            for vi in &mut v {
                *vi /= norm;
            }
            basis.push(v);
        }
        if basis.len() == n - 2 {
            break;
        }
    }
    if basis.len() != n - 2 {
        return Err(GeometryError::DegenerateClosureMatrix { rank: 2 + basis.len() });
    }
    Ok(DMatrix::from_fn(n, n - 2, |r, c| basis[c][r]))
}

/// Signature `(n_plus, n_minus)` of the area form restricted to the
/// closure subspace; `(1, n-3)` for every full-dimensional necklace.
pub fn area_form_signature(s: &Necklace) -> Result<(usize, usize), GeometryError> {
    area_form_signature_with(s, Tolerances::default())
}

pub fn area_form_signature_with(
    s: &Necklace,
    tol: Tolerances,
) -> Result<(usize, usize), GeometryError> {
    let angles = AngleSystem::new(s);
    let n = angles.n();
    // Area as a quadratic form: A(l) = sum_{j<k} l_j l_k sin(phi_k - phi_j) / 2.
    let q = DMatrix::from_fn(n, n, |j, k| {
        if j == k {
            0.0
        } else {
            let (lo, hi) = if j < k { (j, k) } else { (k, j) };
            0.25 * (angles.heading(hi + 1) - angles.heading(lo + 1)).sin()
        }
    });
    let basis = closure_kernel_basis(s)?;
    let restricted = basis.transpose() * q * basis;
    let symmetric = (&restricted + restricted.transpose()) * 0.5;
    let eigen = symmetric.symmetric_eigen();
    let max = eigen.eigenvalues.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    let threshold = tol.spectral * max;
    let mut plus = 0;
    let mut minus = 0;
    for &value in eigen.eigenvalues.iter() {
        if value.abs() <= threshold {
            return Err(GeometryError::DegenerateAreaForm { eigenvalue: value, threshold });
        }
        if value > 0.0 {
            plus += 1;
        } else {
            minus += 1;
        }
    }
    Ok((plus, minus))
}

/// Numeric verdict on a zero set, cross-checking the combinatorial one.
#[derive(Debug, Clone)]
pub enum Feasibility {
    Witness(PolygonRealization),
    Infeasible { run_start: usize, run_len: usize, weight: Rational },
}

impl Feasibility {
    pub fn witness(&self) -> Option<&PolygonRealization> {
        match self {
            Feasibility::Witness(r) => Some(r),
            Feasibility::Infeasible { .. } => None,
        }
    }
}

/// Realizes the face cut out by a zero set, or reports the heavy
/// supervertex run that makes it empty: the tangential witness of the
/// merged necklace re-expanded with zeros, or the digon realization when
/// a merged run ties at exactly `S/2`.
pub fn feasibility_witness(s: &Necklace, z: &ZeroSet) -> Result<Feasibility, GeometryError> {
    let merged = fixed_angles::merge_runs(s, z)?;
    let m = merged.gaps.len();
    let mut tied = None;
    for t in 0..m {
        let from = merged.gaps[t];
        let to = if t + 1 < m { merged.gaps[t + 1] } else { merged.gaps[0] + s.len() };
        match merged.balance(t) {
            crate::necklace::Balance::Heavy => {
                return Ok(Feasibility::Infeasible {
                    run_start: from,
                    run_len: to - from,
                    weight: s.weight(Substring::new(from, to - from)),
                });
            }
            crate::necklace::Balance::Tied => tied = Some(t),
            crate::necklace::Balance::Light => {}
        }
    }
    let angles = AngleSystem::new(s);
    let n = s.len();
    if let Some(t) = tied {
        let g1 = merged.gaps[t];
        let g2 = merged.gaps[(t + 1) % m];
        let mut lengths = vec![0.0f64; n];
        lengths[g1 - 1] = 0.5;
        lengths[g2 - 1] = 0.5;
        return Ok(Feasibility::Witness(PolygonRealization::from_lengths(&angles, lengths)));
    }
    // All runs light, so the merged necklace is full-dimensional.
    let merged_necklace = match fixed_angles::merge(s, z)? {
        MergedNecklace::Proper(mn) => mn,
        MergedNecklace::Degenerate(_) => unreachable!("light runs leave at least 3 entries"),
    };
    let witness = tangential_polygon(&merged_necklace)?;
    let mut lengths = vec![0.0f64; n];
    for (t, &gap) in merged.gaps.iter().enumerate() {
        lengths[gap - 1] = witness.lengths[t];
    }
    Ok(Feasibility::Witness(PolygonRealization::from_lengths(&angles, lengths)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixed_angles::{digon_vertices, enumerate_faces, face_of_zero_set, FaceOutcome};

    fn necklace(entries: &[i64]) -> Necklace {
        Necklace::from_ints(entries).unwrap()
    }

    #[test]
    fn angle_system_totals_two_pi() {
        for entries in [vec![1, 1, 1, 1, 1], vec![1, 3, 2, 4, 5], vec![1, 3, 1, 4, 2, 7]] {
            let s = necklace(&entries);
            let angles = AngleSystem::new(&s);
            assert!((angles.total_turn() - 2.0 * PI).abs() < 1e-12);
            assert_eq!(angles.heading(1), 0.0);
        }
    }

    #[test]
    fn tangential_regular_polygons() {
        let p = tangential_polygon(&necklace(&[1, 1, 1, 1, 1])).unwrap();
        for l in &p.lengths {
            assert!((l - 0.2).abs() < 1e-15);
        }
        let p = tangential_polygon(&necklace(&[1, 1, 1, 1, 1, 1])).unwrap();
        for l in &p.lengths {
            assert!((l - 1.0 / 6.0).abs() < 1e-15);
        }
    }

    #[test]
    fn tangential_interior_witness() {
        let p = tangential_polygon(&necklace(&[1, 3, 2, 4, 5])).unwrap();
        assert!(p.lengths.iter().all(|&l| l > 0.0));
        assert!((p.perimeter() - 1.0).abs() < 1e-12);
        assert!(p.closure_residual() <= 1e-12);

        assert!(matches!(
            tangential_polygon(&necklace(&[1, 3, 1, 4, 2, 11])),
            Err(GeometryError::TanSingularity { index: 6 })
        ));
    }

    #[test]
    fn trigon_vertex_realizations() {
        // Equilateral case: the hexagon's trigon vertices cut three equal
        // substrings, so the three gap edges each reach 1/3.
        let s = necklace(&[1, 1, 1, 1, 1, 1]);
        let lattice = enumerate_faces(&s).unwrap();
        for v in lattice.vertices().filter(|v| v.kind == FaceKind::TrigonVertex) {
            let p = vertex_realization(&s, v).unwrap();
            let positive: Vec<f64> = p.lengths.iter().copied().filter(|&l| l > 0.0).collect();
            assert_eq!(positive.len(), 3);
            for l in positive {
                assert!((l - 1.0 / 3.0).abs() < 1e-12);
            }
            assert!(p.closure_residual() <= 1e-9);
        }

        // The all-ones pentagon cuts substrings of lengths (2, 2, 1), so
        // its trigon triangles are isosceles: 1/sqrt(5) plus two equal.
        let s = necklace(&[1, 1, 1, 1, 1]);
        let lattice = enumerate_faces(&s).unwrap();
        for v in lattice.vertices() {
            let p = vertex_realization(&s, v).unwrap();
            let mut positive: Vec<f64> =
                p.lengths.iter().copied().filter(|&l| l > 0.0).collect();
            positive.sort_by(f64::total_cmp);
            assert_eq!(positive.len(), 3);
            assert!((positive[2] - 5.0f64.sqrt().recip()).abs() < 1e-12);
            assert!((positive[0] - positive[1]).abs() < 1e-12);
            assert!(p.closure_residual() <= 1e-9);
        }

        let s = necklace(&[1, 3, 2, 4, 5]);
        let lattice = enumerate_faces(&s).unwrap();
        for v in lattice.vertices() {
            let p = vertex_realization(&s, v).unwrap();
            assert!((p.perimeter() - 1.0).abs() < 1e-12);
            assert!(p.lengths.iter().all(|&l| l >= 0.0));
            assert!(p.closure_residual() <= 1e-9);
        }
    }

    #[test]
    fn digon_vertex_realization() {
        let s = necklace(&[1, 1, 1, 1, 1, 1]);
        let digons = digon_vertices(&s).unwrap();
        let first = digons.iter().find(|(tie, _)| tie.substring.start == 1).unwrap();
        let p = vertex_realization(&s, &first.1).unwrap();
        assert_eq!(p.lengths[0], 0.5);
        assert_eq!(p.lengths[3], 0.5);
        assert!(p.lengths.iter().sum::<f64>() == 1.0);
        assert!(p.closure_residual() <= 1e-12);
    }

    #[test]
    fn pentagon_area_closed_form() {
        let p = tangential_polygon(&necklace(&[1, 1, 1, 1, 1])).unwrap();
        let expected = (PI / 5.0).tan().recip() / 20.0;
        assert!((p.area() - expected).abs() < 1e-12, "area {}", p.area());
    }

    #[test]
    fn closure_matrix_has_rank_two() {
        for entries in [vec![1, 1, 1, 1], vec![1, 3, 2, 4, 5], vec![1, 1, 10, 1, 1, 1, 10]] {
            assert_eq!(closure_matrix_rank(&necklace(&entries), &Tolerances::default()), 2);
        }
    }

    #[test]
    fn eigensolver_meets_residual_contract() {
        // The signature computation relies on the symmetric eigensolver
        // delivering residuals below 1e-10 on the restricted area form.
        let s = necklace(&[1, 3, 2, 4, 5]);
        let angles = AngleSystem::new(&s);
        let n = angles.n();
        let q = DMatrix::from_fn(n, n, |j, k| {
            if j == k {
                0.0
            } else {
                let (lo, hi) = if j < k { (j, k) } else { (k, j) };
                0.25 * (angles.heading(hi + 1) - angles.heading(lo + 1)).sin()
            }
        });
        let basis = closure_kernel_basis(&s).unwrap();
        let restricted = basis.transpose() * q * basis;
        let symmetric = (&restricted + restricted.transpose()) * 0.5;
        let eigen = symmetric.clone().symmetric_eigen();
        for (col, &value) in eigen.eigenvalues.iter().enumerate() {
            let v = eigen.eigenvectors.column(col);
            let residual = (&symmetric * v - value * v).norm();
            assert!(residual <= 1e-10, "eigen residual {residual}");
        }
    }

    #[test]
    fn signature_examples() {
        assert_eq!(area_form_signature(&necklace(&[1, 1, 1, 1, 1])).unwrap(), (1, 2));
        assert_eq!(area_form_signature(&necklace(&[1, 1, 1, 1])).unwrap(), (1, 1));
        assert_eq!(area_form_signature(&necklace(&[1, 3, 2, 4, 5])).unwrap(), (1, 2));
    }

    #[test]
    fn feasibility_examples() {
        let s = necklace(&[1, 3, 2, 4, 5]);
        match feasibility_witness(&s, &ZeroSet::new([5])).unwrap() {
            Feasibility::Infeasible { run_start, run_len, weight } => {
                assert_eq!((run_start, run_len), (4, 2));
                assert_eq!(weight, Rational::from_integer(9.into()));
            }
            Feasibility::Witness(_) => panic!("zeroing edge 5 must be infeasible"),
        }

        let s = necklace(&[1, 1, 1, 1, 1, 1]);
        let w = feasibility_witness(&s, &ZeroSet::new([2, 3])).unwrap();
        let p = w.witness().expect("digon witness");
        assert_eq!(p.lengths.iter().filter(|&&l| l == 0.5).count(), 2);

        let w = feasibility_witness(&s, &ZeroSet::empty()).unwrap();
        assert!(w.witness().is_some());
    }

    #[test]
    fn feasibility_agrees_with_combinatorics() {
        for entries in [vec![1, 3, 2, 4, 5], vec![1, 1, 1, 1, 1, 1], vec![1, 3, 1, 4, 2, 7]] {
            let s = necklace(&entries);
            let n = s.len();
            for mask in 0u32..(1 << n) - 1 {
                let z = ZeroSet::new((1..=n).filter(|&e| mask >> (e - 1) & 1 == 1));
                let numeric = feasibility_witness(&s, &z).unwrap();
                let combinatorial = face_of_zero_set(&s, &z).unwrap();
                match combinatorial {
                    FaceOutcome::EmptyFace => assert!(numeric.witness().is_none()),
                    FaceOutcome::Face(_) => {
                        let p = numeric.witness().expect("face must have witness");
                        assert!(p.closure_residual() <= 1e-9 * p.perimeter().max(1e-300));
                        assert!(p.lengths.iter().all(|&l| l >= 0.0));
                    }
                }
            }
        }
    }
}
