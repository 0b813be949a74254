//! The conformal transform from fixed-lengths convex polygons to points of
//! the fixed-angles polytope.
//!
//! A ccw-convex polygon with edge lengths `s_1..s_n` places prevertex
//! `z_k = e^{i psi_k}` on the unit circle at the heading of its k-th edge.
//! The derivative of the disk map with those prevertices and exponents
//! `alpha_k = 2 s_k / S` is `f'(w) = prod_k (1 - w/z_k)^{-alpha_k}`, and
//! the k-th image edge is the integral of `f'` along the circle arc from
//! `z_{k-1}` to `z_k`. Arc integrals are evaluated by composite
//! Gauss-Jacobi quadrature: the algebraic endpoint singularities are
//! absorbed into the weight, and panels shrink geometrically so that no
//! unabsorbed singularity is closer to a panel than the panel's length.
//!
//! Image edge lengths are normalized to unit perimeter, which makes the
//! output a point of the fixed-angles polytope of the same necklace.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::AngleSystem;
use crate::necklace::Necklace;

#[derive(Debug, Error)]
pub enum ScError {
    #[error("shape needs at least 4 edges for a 1-parameter family, got {0}")]
    TooFewEdges(usize),
    #[error("edge length {index} is not strictly positive")]
    NonPositiveLength { index: usize },
    #[error("turn {index} is negative; the shape is not ccw-convex")]
    NegativeTurn { index: usize },
    #[error("turns sum to {sum:.12}, not 2*pi")]
    TurnSumMismatch { sum: f64 },
    #[error("fixed-lengths polygon fails to close: residual {residual:.3e}")]
    ShapeClosure { residual: f64 },
    #[error("shape edge {index} does not match the necklace after unit-perimeter scaling")]
    LengthsMismatch { index: usize },
    #[error("turn at vertex {vertex} is zero: coincident prevertices (boundary of the moduli space)")]
    CoincidentPrevertices { vertex: usize },
    #[error("quadrature failed to reach relative tolerance {tolerance:.1e}: last change {last_change:.3e}")]
    QuadratureNotConverged { tolerance: f64, last_change: f64 },
    #[error("image polygon fails to close: residual {residual:.3e} exceeds {tolerance:.1e}")]
    ImageClosure { residual: f64, tolerance: f64 },
    #[error("no inscribed polygon with its circumcenter inside exists for these lengths")]
    NoInscribedPolygon,
    #[error("turn continuation stalled at rho = {rho:.3e} (residual {residual:.3e})")]
    NewtonStalled { rho: f64, residual: f64 },
    #[error("vertex index {k} outside 1..={n}")]
    VertexOutOfRange { k: usize, n: usize },
    #[error("probe needs at least two positive turn values, got {0}")]
    TooFewProbePoints(usize),
}

/// Relative tolerance the quadrature must certify by node doubling.
pub const QUADRATURE_REL_TOL: f64 = 1e-8;

/// A ccw-convex polygon with fixed edge lengths: lengths `s_k`, exterior
/// turns `t_k` (the turn at vertex `k`, between edges `k` and `k+1`), and
/// the heading of edge 1.
#[derive(Debug, Clone, Serialize)]
pub struct FixedLengthsShape {
    lengths: Vec<f64>,
    turns: Vec<f64>,
    base_heading: f64,
}

impl FixedLengthsShape {
    pub fn new(lengths: Vec<f64>, turns: Vec<f64>, base_heading: f64) -> Result<Self, ScError> {
        let n = lengths.len();
        if n < 3 || turns.len() != n {
            return Err(ScError::TooFewEdges(n.min(turns.len())));
        }
        for (i, &l) in lengths.iter().enumerate() {
            if !(l > 0.0) {
                return Err(ScError::NonPositiveLength { index: i + 1 });
            }
        }
        for (i, &t) in turns.iter().enumerate() {
            if t < 0.0 {
                return Err(ScError::NegativeTurn { index: i + 1 });
            }
        }
        let sum: f64 = turns.iter().sum();
        if (sum - 2.0 * PI).abs() > 1e-10 {
            return Err(ScError::TurnSumMismatch { sum });
        }
        let shape = FixedLengthsShape { lengths, turns, base_heading };
        let residual = shape.closure_residual();
        if residual > 1e-9 * shape.perimeter() {
            return Err(ScError::ShapeClosure { residual });
        }
        Ok(shape)
    }

    /// The regular n-gon with unit-sum edge lengths.
    pub fn regular(n: usize) -> Self {
        FixedLengthsShape {
            lengths: vec![1.0 / n as f64; n],
            turns: vec![2.0 * PI / n as f64; n],
            base_heading: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn turns(&self) -> &[f64] {
        &self.turns
    }

    pub fn base_heading(&self) -> f64 {
        self.base_heading
    }

    pub fn perimeter(&self) -> f64 {
        self.lengths.iter().sum()
    }

    /// Edge headings `psi_1..psi_n`, with `psi_{k+1} = psi_k + t_k`.
    pub fn headings(&self) -> Vec<f64> {
        let n = self.n();
        let mut psi = Vec::with_capacity(n);
        let mut h = self.base_heading;
        for k in 0..n {
            psi.push(h);
            h += self.turns[k];
        }
        psi
    }

    pub fn closure_residual(&self) -> f64 {
        let psi = self.headings();
        let mut acc = Complex64::new(0.0, 0.0);
        for (l, p) in self.lengths.iter().zip(&psi) {
            acc += l * Complex64::from_polar(1.0, *p);
        }
        acc.norm()
    }

    /// Same polygon with labels shifted so edge 1 becomes former edge
    /// `r + 1`.
    pub fn rotated_labels(&self, r: usize) -> Self {
        let n = self.n();
        let r = r % n;
        let psi = self.headings();
        FixedLengthsShape {
            lengths: (0..n).map(|i| self.lengths[(i + r) % n]).collect(),
            turns: (0..n).map(|i| self.turns[(i + r) % n]).collect(),
            base_heading: psi[r],
        }
    }
}

/// Prevertices on the unit circle, in strictly increasing angular order.
#[derive(Debug, Clone)]
pub struct Prevertices {
    pub angles: Vec<f64>,
    pub points: Vec<Complex64>,
}

/// Places prevertex `k` at the heading of edge `k`; requires a strictly
/// convex shape (all turns positive) so the prevertices are distinct.
pub fn prevertices(shape: &FixedLengthsShape) -> Result<Prevertices, ScError> {
    for (i, &t) in shape.turns().iter().enumerate() {
        if t <= 0.0 {
            return Err(ScError::CoincidentPrevertices { vertex: i + 1 });
        }
    }
    let angles = shape.headings();
    let points = angles.iter().map(|&a| Complex64::from_polar(1.0, a)).collect();
    Ok(Prevertices { angles, points })
}

/// Exponents `alpha_k = 2 s_k / S`; each lies in (0, 1) for a
/// full-dimensional necklace and they sum to 2.
#[derive(Debug, Clone)]
pub struct ScExponents(pub Vec<f64>);

impl ScExponents {
    pub fn new(s: &Necklace) -> Self {
        let total = crate::geometry::rational_to_f64(s.total());
        ScExponents(
            (1..=s.len())
                .map(|k| 2.0 * crate::geometry::rational_to_f64(s.entry(k as i64)) / total)
                .collect(),
        )
    }
}

/// Image of the conformal transform with quadrature diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct KmImage {
    /// Unit-perimeter image edge lengths.
    pub lengths: Vec<f64>,
    /// Residual of the image closure under the fixed-angles headings.
    pub closure_residual: f64,
    /// Node count per panel at which the result was accepted.
    pub nodes: usize,
    /// Relative change from the previous refinement level.
    pub max_rel_change: f64,
    /// Panels across all arcs at the accepted level.
    pub panels: usize,
}

/// Maps a fixed-lengths convex polygon to the length vector of its image
/// fixed-angles polygon.
pub fn km_map(s: &Necklace, shape: &FixedLengthsShape) -> Result<Vec<f64>, ScError> {
    Ok(km_map_detailed(s, shape)?.lengths)
}

pub fn km_map_detailed(s: &Necklace, shape: &FixedLengthsShape) -> Result<KmImage, ScError> {
    let n = s.len();
    if shape.n() != n {
        return Err(ScError::LengthsMismatch { index: 0 });
    }
    // The shape's lengths must be the necklace, up to one global scale.
    let total = crate::geometry::rational_to_f64(s.total());
    let perimeter = shape.perimeter();
    for k in 0..n {
        let want = crate::geometry::rational_to_f64(s.entry(k as i64 + 1)) / total;
        let got = shape.lengths()[k] / perimeter;
        if (want - got).abs() > 1e-12 {
            return Err(ScError::LengthsMismatch { index: k + 1 });
        }
    }
    let pre = prevertices(shape)?;
    let alphas = ScExponents::new(s).0;
    let mut integrator = ArcIntegrator::new(&pre.angles, &alphas);

    let mut nodes = 24usize;
    let mut previous: Option<Vec<f64>> = None;
    let mut last_change = f64::INFINITY;
    for _ in 0..4 {
        let (moduli, panels) = integrator.all_arcs(nodes)?;
        if let Some(prev) = &previous {
            let max_rel = prev
                .iter()
                .zip(&moduli)
                .map(|(a, b)| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE))
                .fold(0.0f64, f64::max);
            if max_rel <= QUADRATURE_REL_TOL {
                return finish_image(s, moduli, nodes, max_rel, panels);
            }
            last_change = max_rel;
        }
        previous = Some(moduli);
        nodes *= 2;
    }
    Err(ScError::QuadratureNotConverged { tolerance: QUADRATURE_REL_TOL, last_change })
}

fn finish_image(
    s: &Necklace,
    mut lengths: Vec<f64>,
    nodes: usize,
    max_rel_change: f64,
    panels: usize,
) -> Result<KmImage, ScError> {
    let total: f64 = lengths.iter().sum();
    for l in &mut lengths {
        *l /= total;
    }
    let angles = AngleSystem::new(s);
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, &l) in lengths.iter().enumerate() {
        let (c, si) = angles.unit(k + 1);
        acc += l * Complex64::new(c, si);
    }
    let closure_residual = acc.norm();
    if closure_residual > QUADRATURE_REL_TOL {
        return Err(ScError::ImageClosure {
            residual: closure_residual,
            tolerance: QUADRATURE_REL_TOL,
        });
    }
    Ok(KmImage { lengths, closure_residual, nodes, max_rel_change, panels })
}

/// One panel of an arc: `[lo, hi]` with optionally absorbed endpoint
/// exponents (the alpha of the prevertex sitting exactly at that end).
struct Panel {
    lo: f64,
    hi: f64,
    left_alpha: Option<f64>,
    right_alpha: Option<f64>,
}

struct ArcIntegrator<'a> {
    angles: &'a [f64],
    alphas: &'a [f64],
    rules: HashMap<(usize, u64, u64), quad::GaussRule>,
}

impl<'a> ArcIntegrator<'a> {
    fn new(angles: &'a [f64], alphas: &'a [f64]) -> Self {
        ArcIntegrator { angles, alphas, rules: HashMap::new() }
    }

    /// Moduli of the derivative integrals over every arc.
    fn all_arcs(&mut self, nodes: usize) -> Result<(Vec<f64>, usize), ScError> {
        let n = self.angles.len();
        let mut moduli = Vec::with_capacity(n);
        let mut panel_count = 0usize;
        for j in 0..n {
            let (value, panels) = self.one_arc(j, nodes)?;
            moduli.push(value.norm());
            panel_count += panels;
        }
        Ok((moduli, panel_count))
    }

    /// Integral of `f'` over the arc from prevertex `j-1` to prevertex `j`
    /// (0-based edge index `j`).
    fn one_arc(&mut self, j: usize, nodes: usize) -> Result<(Complex64, usize), ScError> {
        let n = self.angles.len();
        let left = (j + n - 1) % n;
        let lo = if j == 0 { self.angles[n - 1] - 2.0 * PI } else { self.angles[j - 1] };
        let hi = self.angles[j];
        let mut panels = Vec::new();
        self.split(lo, hi, Some(left), Some(j), &mut panels, 0);
        let mut total = Complex64::new(0.0, 0.0);
        let count = panels.len();
        for panel in panels {
            total += self.integrate_panel(&panel, nodes);
        }
        Ok((total, count))
    }

    /// Distance from a prevertex to the interval, on the circle.
    fn circle_distance(&self, angle: f64, lo: f64, hi: f64) -> f64 {
        let mut best = f64::INFINITY;
        for shift in [-2.0 * PI, 0.0, 2.0 * PI] {
            let a = angle + shift;
            let d = if a < lo {
                lo - a
            } else if a > hi {
                a - hi
            } else {
                0.0
            };
            best = best.min(d);
        }
        best
    }

    /// Splits until no unabsorbed singularity is closer than the panel
    /// length. `labs`/`rabs` are prevertex indices absorbed at the panel's
    /// own endpoints.
    fn split(
        &self,
        lo: f64,
        hi: f64,
        labs: Option<usize>,
        rabs: Option<usize>,
        out: &mut Vec<Panel>,
        depth: usize,
    ) {
        let len = hi - lo;
        let mut dist = f64::INFINITY;
        for (idx, &angle) in self.angles.iter().enumerate() {
            if Some(idx) == labs || Some(idx) == rabs {
                continue;
            }
            dist = dist.min(self.circle_distance(angle, lo, hi));
        }
        if len <= dist || depth >= 60 {
            out.push(Panel {
                lo,
                hi,
                left_alpha: labs.map(|i| self.alphas[i]),
                right_alpha: rabs.map(|i| self.alphas[i]),
            });
            return;
        }
        let mid = 0.5 * (lo + hi);
        self.split(lo, mid, labs, None, out, depth + 1);
        self.split(mid, hi, None, rabs, out, depth + 1);
    }

    /// `f'(w) * i * w` at `theta`, with `w = e^{i theta}`.
    fn derivative_times_dw(&self, theta: f64) -> Complex64 {
        let mut log_sum = Complex64::new(0.0, 0.0);
        for (&psi, &alpha) in self.angles.iter().zip(self.alphas) {
            let one_minus = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, theta - psi);
            log_sum -= alpha * one_minus.ln();
        }
        let w = Complex64::from_polar(1.0, theta);
        log_sum.exp() * Complex64::i() * w
    }

    fn integrate_panel(&mut self, panel: &Panel, nodes: usize) -> Complex64 {
        let a = panel.right_alpha.map_or(0.0, |alpha| -alpha);
        let b = panel.left_alpha.map_or(0.0, |alpha| -alpha);
        let key = (nodes, a.to_bits(), b.to_bits());
        let rule = self
            .rules
            .entry(key)
            .or_insert_with(|| quad::gauss_jacobi(nodes, a, b))
            .clone();
        let half = 0.5 * (panel.hi - panel.lo);
        let mid = 0.5 * (panel.hi + panel.lo);
        let mut acc = Complex64::new(0.0, 0.0);
        for (&x, &weight) in rule.nodes.iter().zip(&rule.weights) {
            let theta = mid + half * x;
            let mut value = self.derivative_times_dw(theta);
            // The weight already carries (1-x)^a (1+x)^b; divide those
            // singular factors out of the integrand.
            if let Some(alpha) = panel.left_alpha {
                value *= (1.0 + x).powf(alpha);
            }
            if let Some(alpha) = panel.right_alpha {
                value *= (1.0 - x).powf(alpha);
            }
            acc += weight * value;
        }
        acc * half
    }
}

/// The convex polygon with the necklace's edge lengths inscribed in a
/// circle (every vertex on one circle), used as a canonical interior
/// shape. Requires the circumcenter to lie inside the polygon.
pub fn inscribed_shape(s: &Necklace) -> Result<FixedLengthsShape, ScError> {
    let total = crate::geometry::rational_to_f64(s.total());
    let lengths: Vec<f64> =
        (1..=s.len()).map(|k| crate::geometry::rational_to_f64(s.entry(k as i64)) / total).collect();
    inscribed_shape_from_lengths(&lengths)
}

fn inscribed_shape_from_lengths(lengths: &[f64]) -> Result<FixedLengthsShape, ScError> {
    let n = lengths.len();
    let smax = lengths.iter().cloned().fold(0.0f64, f64::max);
    let angle_sum = |radius: f64| -> f64 {
        lengths.iter().map(|&l| 2.0 * (l / (2.0 * radius)).min(1.0).asin()).sum::<f64>()
    };
    let mut lo = smax / 2.0 * (1.0 + 1e-15);
    if angle_sum(lo) < 2.0 * PI {
        return Err(ScError::NoInscribedPolygon);
    }
    let mut hi = smax.max(lengths.iter().sum());
    while angle_sum(hi) > 2.0 * PI {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if angle_sum(mid) > 2.0 * PI {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let radius = 0.5 * (lo + hi);
    let central: Vec<f64> = lengths.iter().map(|&l| 2.0 * (l / (2.0 * radius)).asin()).collect();
    let turns: Vec<f64> = (0..n).map(|k| 0.5 * (central[k] + central[(k + 1) % n])).collect();
    FixedLengthsShape::new(lengths.to_vec(), turns, 0.0)
}

/// A member of the one-parameter family of shapes in which the turn at
/// vertex `k` is pinned to `rho`: the freed turn is redistributed to the
/// two neighboring vertices and the remaining turns rescale slightly so
/// the polygon still closes.
pub fn shape_with_pinched_turn(
    s: &Necklace,
    k: usize,
    rho: f64,
) -> Result<FixedLengthsShape, ScError> {
    let base = inscribed_shape(s)?;
    let mut solver = TurnContinuation::start(&base, k)?;
    solver.advance_to(rho)?;
    solver.shape()
}

/// Gauss-Newton continuation over the pinned turn value. The free
/// unknowns are the other `n - 1` turns; each step takes the minimum-norm
/// correction solving the three constraints (turn sum and closure), so
/// the freed turn is spread as evenly as the geometry allows. Each new
/// target seeds the solve by redistributing the turn change to the two
/// neighboring vertices.
struct TurnContinuation {
    lengths: Vec<f64>,
    k0: usize,
    /// Current turns at the free (non-pinned) positions, in index order.
    free: Vec<f64>,
    rho: f64,
    /// Previous converged point, for the secant predictor.
    previous: Option<(f64, Vec<f64>)>,
}

impl TurnContinuation {
    fn start(base: &FixedLengthsShape, k: usize) -> Result<Self, ScError> {
        let n = base.n();
        if n < 4 {
            return Err(ScError::TooFewEdges(n));
        }
        if k < 1 || k > n {
            return Err(ScError::VertexOutOfRange { k, n });
        }
        let k0 = k - 1;
        let free =
            base.turns().iter().enumerate().filter(|&(j, _)| j != k0).map(|(_, &t)| t).collect();
        Ok(TurnContinuation {
            lengths: base.lengths().to_vec(),
            k0,
            free,
            rho: base.turns()[k0],
            previous: None,
        })
    }

    fn turns_for(&self, free: &[f64], rho: f64) -> Vec<f64> {
        let n = self.lengths.len();
        let mut turns = Vec::with_capacity(n);
        let mut it = free.iter();
        for j in 0..n {
            if j == self.k0 {
                turns.push(rho);
            } else {
                turns.push(*it.next().expect("one free turn per other vertex"));
            }
        }
        turns
    }

    fn residual(&self, free: &[f64], rho: f64) -> [f64; 3] {
        let turns = self.turns_for(free, rho);
        let mut psi = 0.0f64;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut sum = 0.0f64;
        for (j, &t) in turns.iter().enumerate() {
            acc += self.lengths[j] * Complex64::from_polar(1.0, psi);
            psi += t;
            sum += t;
        }
        [sum - 2.0 * PI, acc.re, acc.im]
    }

    /// Initial guess for the solve at `rho`: secant extrapolation from the
    /// last two converged points, or redistribution of the turn change to
    /// the two neighboring vertices at the first step.
    fn seed_for(&self, rho: f64) -> Vec<f64> {
        if let Some((prev_rho, prev_free)) = &self.previous {
            let span = self.rho - prev_rho;
            if span.abs() > 1e-14 {
                let ratio = (rho - self.rho) / span;
                return self
                    .free
                    .iter()
                    .zip(prev_free)
                    .map(|(cur, old)| cur + ratio * (cur - old))
                    .collect();
            }
        }
        let mut free = self.free.clone();
        let delta = self.rho - rho;
        let n = self.lengths.len();
        free[free_position(self.k0, (self.k0 + n - 1) % n)] += delta / 2.0;
        free[free_position(self.k0, (self.k0 + 1) % n)] += delta / 2.0;
        free
    }

    /// Levenberg-Marquardt solve of the three constraints at pinned `rho`.
    fn newton(&mut self, rho: f64) -> Result<(), ScError> {
        let m = self.free.len();
        let mut free = self.seed_for(rho);
        let norm2 = |f: &[f64; 3]| (f[0] * f[0] + f[1] * f[1] + f[2] * f[2]).sqrt();
        let mut lambda = 1e-10f64;
        for _ in 0..100 {
            let f = self.residual(&free, rho);
            let norm = norm2(&f);
            if norm <= 1e-12 {
                self.previous = Some((self.rho, std::mem::take(&mut self.free)));
                self.free = free;
                self.rho = rho;
                return Ok(());
            }
            // 3 x m forward-difference Jacobian (stored by column).
            let mut jac = vec![[0.0f64; 3]; m];
            for col in 0..m {
                let h = 1e-7 * free[col].abs().max(1e-4);
                let saved = free[col];
                free[col] = saved + h;
                let fh = self.residual(&free, rho);
                free[col] = saved;
                for row in 0..3 {
                    jac[col][row] = (fh[row] - f[row]) / h;
                }
            }
            let mut gram = [[0.0f64; 3]; 3];
            for row in 0..3 {
                for col in 0..3 {
                    gram[row][col] = jac.iter().map(|j| j[row] * j[col]).sum();
                }
            }
            // Damped minimum-norm step, retried with stronger damping
            // until the residual drops.
            let mut accepted = false;
            while lambda <= 1e8 {
                let mut damped = gram;
                for (diag, row) in damped.iter_mut().enumerate() {
                    row[diag] += lambda * gram[diag][diag].max(1e-12);
                }
                if let Some(multipliers) = solve3(&damped, &f) {
                    let trial: Vec<f64> = free
                        .iter()
                        .zip(&jac)
                        .map(|(x, j)| {
                            x - (j[0] * multipliers[0]
                                + j[1] * multipliers[1]
                                + j[2] * multipliers[2])
                        })
                        .collect();
                    if norm2(&self.residual(&trial, rho)) < norm {
                        free = trial;
                        lambda = (lambda / 5.0).max(1e-12);
                        accepted = true;
                        break;
                    }
                }
                lambda *= 10.0;
            }
            if !accepted {
                return Err(ScError::NewtonStalled { rho, residual: norm });
            }
        }
        let norm = norm2(&self.residual(&free, rho));
        Err(ScError::NewtonStalled { rho, residual: norm })
    }

    /// Walks the pinned turn geometrically from its current value down (or
    /// up) to `target`, converging at each intermediate value; small
    /// ratios keep every solve near the previous solution, where the
    /// secant predictor is accurate.
    fn advance_to(&mut self, target: f64) -> Result<(), ScError> {
        if !(target > 0.0) {
            return Err(ScError::NewtonStalled { rho: target, residual: f64::INFINITY });
        }
        while (self.rho / target).max(target / self.rho) > 1.15 {
            let next = if self.rho > target {
                (self.rho * 0.9).max(target)
            } else {
                (self.rho * 1.1).min(target)
            };
            self.newton(next)?;
        }
        if (self.rho - target).abs() > 1e-15 {
            self.newton(target)?;
        }
        Ok(())
    }

    fn shape(&self) -> Result<FixedLengthsShape, ScError> {
        FixedLengthsShape::new(self.lengths.clone(), self.turns_for(&self.free, self.rho), 0.0)
    }
}

/// Position of vertex `idx` in the free-turn vector (all positions except
/// the pinned one, in index order).
fn free_position(pinned: usize, idx: usize) -> usize {
    if idx < pinned {
        idx
    } else {
        idx - 1
    }
}

fn solve3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let det = |m: &[[f64; 3]; 3]| -> f64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    if d.abs() < 1e-300 {
        return None;
    }
    let mut out = [0.0f64; 3];
    for col in 0..3 {
        let mut m = *a;
        for row in 0..3 {
            m[row][col] = b[row];
        }
        out[col] = det(&m) / d;
    }
    Some(out)
}

/// Moduli of the raw arc integrals (fixed conformal normalization, no
/// unit-perimeter rescale), for asymptotic diagnostics.
pub fn arc_moduli(s: &Necklace, shape: &FixedLengthsShape) -> Result<Vec<f64>, ScError> {
    let pre = prevertices(shape)?;
    let alphas = ScExponents::new(s).0;
    let mut integrator = ArcIntegrator::new(&pre.angles, &alphas);
    let (a, _) = integrator.all_arcs(48)?;
    let (b, _) = integrator.all_arcs(96)?;
    let max_rel = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs() / y.abs().max(f64::MIN_POSITIVE))
        .fold(0.0f64, f64::max);
    if max_rel > QUADRATURE_REL_TOL {
        return Err(ScError::QuadratureNotConverged {
            tolerance: QUADRATURE_REL_TOL,
            last_change: max_rel,
        });
    }
    Ok(b)
}

/// One probe sample at a pinned turn value.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeSample {
    pub rho: f64,
    /// Modulus of the raw arc integral under the fixed conformal
    /// normalization (constant 1, prevertices as given).
    pub edge_modulus: f64,
    /// The same edge after unit-perimeter rescaling of the whole image.
    pub normalized_length: f64,
}

/// Result of the boundary exponent probe: as the turn `rho` at vertex `k`
/// tends to zero, the image edge joining the vertices with shangles `s_k`
/// and `s_{k+1}` vanishes like `rho^q` with `q = 1 - 2(s_k + s_{k+1})/S`.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub q_hat: f64,
    pub q_analytic: f64,
    /// Samples in decreasing rho order.
    pub samples: Vec<ProbeSample>,
    /// Largest absolute deviation of `log r` from the fitted line.
    pub fit_residual: f64,
}

/// Fits the vanishing rate of the image edge at vertex `k` over the given
/// decreasing turn values.
///
/// The fit uses the raw arc modulus, i.e. the edge length of the image
/// under the fixed conformal normalization (integration constant 1,
/// prevertices as given). Rescaling every image to unit perimeter would
/// multiply `r` by a rho-dependent factor that carries its own
/// `rho^q`-sized correction and visibly biases the finite-rho slope,
/// without changing the limit exponent; the fixed normalization leaves
/// only O(rho) corrections. Both values appear in the samples.
pub fn boundary_exponent_probe(
    s: &Necklace,
    k: usize,
    rhos: &[f64],
) -> Result<ProbeReport, ScError> {
    let n = s.len();
    if k < 1 || k > n {
        return Err(ScError::VertexOutOfRange { k, n });
    }
    let mut sorted: Vec<f64> = rhos.to_vec();
    sorted.retain(|&r| r > 0.0);
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted.dedup();
    if sorted.len() < 2 {
        return Err(ScError::TooFewProbePoints(sorted.len()));
    }
    let base = inscribed_shape(s)?;
    let mut solver = TurnContinuation::start(&base, k)?;
    let edge = s.label(k as i64 + 1);
    let mut samples = Vec::with_capacity(sorted.len());
    for &rho in &sorted {
        solver.advance_to(rho)?;
        let shape = solver.shape()?;
        let moduli = arc_moduli(s, &shape)?;
        let perimeter: f64 = moduli.iter().sum();
        samples.push(ProbeSample {
            rho,
            edge_modulus: moduli[edge - 1],
            normalized_length: moduli[edge - 1] / perimeter,
        });
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.rho.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.edge_modulus.ln()).collect();
    let mean_x = xs.iter().sum::<f64>() / xs.len() as f64;
    let mean_y = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let q_hat = sxy / sxx;
    let intercept = mean_y - q_hat * mean_x;
    let fit_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + q_hat * x)).abs())
        .fold(0.0f64, f64::max);
    let total = crate::geometry::rational_to_f64(s.total());
    let sk = crate::geometry::rational_to_f64(s.entry(k as i64));
    let sk1 = crate::geometry::rational_to_f64(s.entry(k as i64 + 1));
    let q_analytic = 1.0 - 2.0 * (sk + sk1) / total;
    Ok(ProbeReport { q_hat, q_analytic, samples, fit_residual })
}

/// Gauss-Jacobi quadrature on [-1, 1] with weight `(1-x)^a (1+x)^b`,
/// computed by the Golub-Welsch eigenvalue method.
mod quad {
    use nalgebra::DMatrix;

    #[derive(Debug, Clone)]
    pub struct GaussRule {
        pub nodes: Vec<f64>,
        pub weights: Vec<f64>,
    }

    pub fn gauss_jacobi(deg: usize, a: f64, b: f64) -> GaussRule {
        assert!(deg >= 2 && a > -1.0 && b > -1.0, "invalid Jacobi rule ({deg}, {a}, {b})");
        let mut matrix = DMatrix::<f64>::zeros(deg, deg);
        matrix[(0, 0)] = (b - a) / (a + b + 2.0);
        for i in 1..deg {
            let s = 2.0 * i as f64 + a + b;
            matrix[(i, i)] = (b * b - a * a) / (s * (s + 2.0));
            let i_f = i as f64;
            let off = 2.0 / s
                * (i_f * (i_f + a) * (i_f + b) * (i_f + a + b) / ((s + 1.0) * (s - 1.0))).sqrt();
            matrix[(i - 1, i)] = off;
            matrix[(i, i - 1)] = off;
        }
        let eigen = matrix.symmetric_eigen();
        let mu0 = 2.0f64.powf(a + b + 1.0) * gamma(a + 1.0) * gamma(b + 1.0) / gamma(a + b + 2.0);
        let mut pairs: Vec<(f64, f64)> = eigen
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(col, &node)| {
                let first = eigen.eigenvectors[(0, col)];
                (node, mu0 * first * first)
            })
            .collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        GaussRule {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// Lanczos approximation (g = 7, 9 terms), with reflection for small
    /// arguments; relative error around 1e-15 on the range used here.
    pub fn gamma(x: f64) -> f64 {
        const COEFFS: [f64; 8] = [
            676.5203681218851,
            -1259.1392167224028,
            771.323_428_777_653_1,
            -176.615_029_162_140_6,
            12.507343278686905,
            -0.13857109526572012,
            9.984_369_578_019_572e-6,
            1.5056327351493116e-7,
        ];
        if x < 0.5 {
            return std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x));
        }
        let z = x - 1.0;
        let mut acc = 0.999_999_999_999_809_9;
        for (i, &c) in COEFFS.iter().enumerate() {
            acc += c / (z + i as f64 + 1.0);
        }
        let t = z + 7.5;
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn necklace(entries: &[i64]) -> Necklace {
        Necklace::from_ints(entries).unwrap()
    }

    #[test]
    fn gamma_known_values() {
        assert!((quad::gamma(1.0) - 1.0).abs() < 1e-14);
        assert!((quad::gamma(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((quad::gamma(4.0) - 6.0).abs() < 1e-12);
        assert!((quad::gamma(0.3) - 2.991568987687590).abs() < 1e-12);
    }

    #[test]
    fn legendre_rule_integrates_smooth_functions() {
        let rule = quad::gauss_jacobi(16, 0.0, 0.0);
        let integral: f64 =
            rule.nodes.iter().zip(&rule.weights).map(|(&x, &w)| w * x.cos()).sum();
        assert!((integral - 2.0 * 1.0f64.sin()).abs() < 1e-14);
        let weight_sum: f64 = rule.weights.iter().sum();
        assert!((weight_sum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_weight_sum_matches_independent_quadrature() {
        // mu0 = int (1-x)^a (1+x)^b dx via the substitution x = cos(theta):
        // the integrand becomes theta^(2a+1)-like at the ends, which
        // vanishes for a, b > -1/2, so composite Simpson gives an
        // independent check of the Golub-Welsch scale.
        for (a, b) in [(-0.3, -0.4), (-0.45, 0.0), (-0.2, -0.35)] {
            let rule = quad::gauss_jacobi(20, a, b);
            let weight_sum: f64 = rule.weights.iter().sum();
            let steps = 400_000;
            let h = PI / steps as f64;
            let f = |theta: f64| -> f64 {
                let x: f64 = theta.cos();
                if 1.0 - x <= 0.0 || 1.0 + x <= 0.0 {
                    return 0.0;
                }
                (1.0 - x).powf(a) * (1.0 + x).powf(b) * theta.sin()
            };
            let mut simpson = 0.0;
            for i in 0..steps {
                let t0 = i as f64 * h;
                simpson += h / 6.0 * (f(t0) + 4.0 * f(t0 + 0.5 * h) + f(t0 + h));
            }
            assert!(
                (weight_sum - simpson).abs() < 1e-6,
                "weight sum {weight_sum} vs numeric {simpson} at ({a}, {b})"
            );
        }
    }

    #[test]
    fn shape_validation() {
        assert!(FixedLengthsShape::new(vec![1.0; 5], vec![2.0 * PI / 5.0; 5], 0.0).is_ok());
        assert!(matches!(
            FixedLengthsShape::new(vec![1.0; 5], vec![2.0 * PI / 5.0; 4], 0.0),
            Err(ScError::TooFewEdges(_))
        ));
        assert!(matches!(
            FixedLengthsShape::new(vec![1.0, -1.0, 1.0, 1.0, 1.0], vec![2.0 * PI / 5.0; 5], 0.0),
            Err(ScError::NonPositiveLength { index: 2 })
        ));
        // Valid turn sum but no closure.
        let bad = FixedLengthsShape::new(
            vec![0.25; 4],
            vec![PI / 2.0 + 0.3, PI / 2.0 - 0.1, PI / 2.0 + 0.1, PI / 2.0 - 0.3],
            0.0,
        );
        assert!(matches!(bad, Err(ScError::ShapeClosure { .. })));
    }

    #[test]
    fn prevertices_of_regular_shape() {
        let shape = FixedLengthsShape::regular(4);
        let pre = prevertices(&shape).unwrap();
        for (k, z) in pre.points.iter().enumerate() {
            let expect = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 4.0);
            assert!((z - expect).norm() < 1e-14);
            assert!((z.norm() - 1.0).abs() < 1e-12);
        }

        // A square with its left side split by a phantom vertex: the zero
        // turn there makes two prevertices coincide.
        let turns = vec![PI / 2.0, PI / 2.0, 0.0, PI / 2.0, PI / 2.0];
        let lengths = vec![1.0, 1.0, 0.5, 0.5, 1.0];
        let shape = FixedLengthsShape::new(lengths, turns, 0.0).unwrap();
        assert!(matches!(
            prevertices(&shape),
            Err(ScError::CoincidentPrevertices { vertex: 3 })
        ));
    }

    #[test]
    fn regular_pentagon_maps_to_regular_image() {
        let s = necklace(&[1, 1, 1, 1, 1]);
        let image = km_map_detailed(&s, &FixedLengthsShape::regular(5)).unwrap();
        for &l in &image.lengths {
            assert!((l - 0.2).abs() < 1e-8, "length {l}");
        }
        assert!(image.closure_residual <= 1e-8);
        assert!(image.max_rel_change <= QUADRATURE_REL_TOL);
        let perimeter: f64 = image.lengths.iter().sum();
        assert!((perimeter - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sheared_pentagon_stays_interior() {
        let s = necklace(&[1, 1, 1, 1, 1]);
        let shape = shape_with_pinched_turn(&s, 1, 0.7).unwrap();
        assert!((shape.turns()[0] - 0.7).abs() < 1e-12);
        let image = km_map_detailed(&s, &shape).unwrap();
        assert!(image.lengths.iter().all(|&l| l > 0.0));
        assert!(image.closure_residual <= 1e-8);
        let perimeter: f64 = image.lengths.iter().sum();
        assert!((perimeter - 1.0).abs() < 1e-12);
    }

    #[test]
    fn label_rotation_equivariance() {
        let s = necklace(&[1, 1, 1, 1, 1]);
        let shape = shape_with_pinched_turn(&s, 1, 0.8).unwrap();
        let image = km_map(&s, &shape).unwrap();
        let rotated = shape.rotated_labels(1);
        let rotated_image = km_map(&s, &rotated).unwrap();
        for k in 0..5 {
            assert!(
                (rotated_image[k] - image[(k + 1) % 5]).abs() < 1e-8,
                "equivariance failed at edge {k}"
            );
        }
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let s = necklace(&[1, 2, 1, 1, 1]);
        let shape = FixedLengthsShape::regular(5);
        assert!(matches!(km_map(&s, &shape), Err(ScError::LengthsMismatch { .. })));
    }

    #[test]
    fn infeasible_pinch_is_detected() {
        // Closing [1,3,2,4,5] with the turn between edges 4 and 5 pinned
        // needs |4 + 5 e^{i rho}| <= 6, i.e. rho >= 1.6961...; below that
        // no polygon exists and the continuation must report a stall.
        let s = necklace(&[1, 3, 2, 4, 5]);
        assert!(shape_with_pinched_turn(&s, 4, 1.75).is_ok());
        assert!(matches!(
            shape_with_pinched_turn(&s, 4, 1.0),
            Err(ScError::NewtonStalled { .. })
        ));
    }

    #[test]
    fn inscribed_shapes_close() {
        for entries in [vec![1, 1, 1, 1, 1], vec![1, 3, 2, 4, 5], vec![1, 2, 2, 3, 2, 2]] {
            let s = necklace(&entries);
            let shape = inscribed_shape(&s).unwrap();
            assert!(shape.closure_residual() <= 1e-9 * shape.perimeter());
            assert!(shape.turns().iter().all(|&t| t > 0.0));
        }
    }

    #[test]
    fn probe_matches_analytic_exponent() {
        let s = necklace(&[1, 1, 1, 1, 1]);
        let rhos = [1e-2, 3e-3, 1e-3, 3e-4];
        let report = boundary_exponent_probe(&s, 1, &rhos).unwrap();
        assert!((report.q_analytic - 0.2).abs() < 1e-12);
        let rel = (report.q_hat - report.q_analytic).abs() / report.q_analytic;
        assert!(rel < 0.02, "q_hat {} vs analytic {}", report.q_hat, report.q_analytic);
    }
}
