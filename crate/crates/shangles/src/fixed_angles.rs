//! Combinatorial face lattice of the fixed-angles polytope of a necklace.
//!
//! A point of the polytope is a unit-perimeter length vector for the
//! polygon with external angles `2*pi*s_k/S`. Each face is identified by
//! its closed zero-edge set: the set of edges pinned to length zero on
//! that face. Edge `e_k` connects the vertices with shangles `s_{k-1}` and
//! `s_k`, so zeroing a cyclic run of edges merges a run of vertices into a
//! supervertex whose shangle is the run's weight. A face is empty exactly
//! when some supervertex would exceed `S/2`, and a supervertex of exactly
//! `S/2` collapses the whole face to a digon vertex.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::necklace::{Balance, Necklace, NecklaceError, Rational, Substring, TieRecord};

/// Default cap on `n` for the exponential zero-set enumeration.
pub const DEFAULT_ENUM_CAP: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FixedAnglesError {
    #[error("the fixed-angles polytope of this necklace is {0:?}, not full-dimensional")]
    NotFullDimensional(PolytopeClass),
    #[error("zero set covers all {0} edges")]
    ZeroSetCoversAll(usize),
    #[error("zero set contains edge {edge}, outside 1..={n}")]
    EdgeOutOfRange { edge: usize, n: usize },
    #[error("necklace length {n} exceeds enumeration cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("face with zero set {0:?} is not a vertex of this polytope")]
    NotAVertex(Vec<usize>),
    #[error("sweep template must mark exactly one entry with '?', found {0}")]
    BadTemplateMark(usize),
    #[error("sweep value {0} is not strictly positive")]
    NonPositiveSweepValue(String),
    #[error(transparent)]
    Necklace(#[from] NecklaceError),
}

/// Trichotomy for the polytope of a necklace, by its maximum entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PolytopeClass {
    /// Some entry exceeds `S/2`: no convex polygon exists.
    Empty,
    /// Some entry equals `S/2`: the polytope is one isolated digon vertex.
    Point,
    /// All entries below `S/2`: dimension `n - 3`.
    FullDim,
}

/// A set of edge indices in `1..=n` pinned to length zero.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct ZeroSet(BTreeSet<usize>);

impl ZeroSet {
    pub fn new<I: IntoIterator<Item = usize>>(edges: I) -> Self {
        ZeroSet(edges.into_iter().collect())
    }

    pub fn empty() -> Self {
        ZeroSet(BTreeSet::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, edge: usize) -> bool {
        self.0.contains(&edge)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.0.iter().copied().collect()
    }

    pub fn is_subset(&self, other: &ZeroSet) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl FromIterator<usize> for ZeroSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        ZeroSet::new(iter)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceKind {
    Generic,
    TrigonVertex,
    DigonVertex,
}

/// A nonempty face, canonically identified by its closed zero-edge set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub closed_zero_set: ZeroSet,
    pub kind: FaceKind,
    pub dim: usize,
}

/// Result of merging the supervertices forced by a zero set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MergedNecklace {
    Proper(Necklace),
    /// One or two supervertices remain; no 1- or 2-entry necklace exists.
    Degenerate(Vec<Rational>),
}

/// Merge bookkeeping: which original edges survive and what the
/// supervertex runs between them weigh.
#[derive(Debug, Clone)]
pub(crate) struct Merged {
    /// Surviving (non-zero) edge indices, ascending.
    pub(crate) gaps: Vec<usize>,
    /// Scaled-integer weight of the run starting at vertex `gaps[t]` and
    /// ending just before `gaps[t+1]` (cyclically).
    pub(crate) run_weights: Vec<BigInt>,
    /// Total weight in the same integer scale, for exact `S/2` comparisons.
    pub(crate) scaled_total: BigInt,
}

impl Merged {
    pub(crate) fn balance(&self, t: usize) -> Balance {
        match (&self.run_weights[t] * 2i32).cmp(&self.scaled_total) {
            std::cmp::Ordering::Less => Balance::Light,
            std::cmp::Ordering::Equal => Balance::Tied,
            std::cmp::Ordering::Greater => Balance::Heavy,
        }
    }
}

/// Classifies the polytope per the maximum entry against `S/2`.
pub fn classify_polytope(s: &Necklace) -> PolytopeClass {
    let mut worst = Balance::Light;
    for k in 1..=s.len() {
        match s.classify_substring(Substring::new(k, 1)).expect("length 1 is classifiable") {
            Balance::Heavy => return PolytopeClass::Empty,
            Balance::Tied => worst = Balance::Tied,
            Balance::Light => {}
        }
    }
    match worst {
        Balance::Tied => PolytopeClass::Point,
        _ => PolytopeClass::FullDim,
    }
}

fn check_zero_set(s: &Necklace, z: &ZeroSet) -> Result<(), FixedAnglesError> {
    let n = s.len();
    for edge in z.iter() {
        if edge < 1 || edge > n {
            return Err(FixedAnglesError::EdgeOutOfRange { edge, n });
        }
    }
    if z.len() == n {
        return Err(FixedAnglesError::ZeroSetCoversAll(n));
    }
    Ok(())
}

pub(crate) fn merge_runs(s: &Necklace, z: &ZeroSet) -> Result<Merged, FixedAnglesError> {
    check_zero_set(s, z)?;
    let n = s.len();
    let (scaled, total) = s.scaled_integer_entries();
    let gaps: Vec<usize> = (1..=n).filter(|e| !z.contains(*e)).collect();
    let m = gaps.len();
    let mut run_weights = Vec::with_capacity(m);
    for t in 0..m {
        let from = gaps[t];
        let to = if t + 1 < m { gaps[t + 1] } else { gaps[0] + n };
        let mut w = BigInt::zero();
        for v in from..to {
            w += &scaled[(v - 1) % n];
        }
        run_weights.push(w);
    }
    Ok(Merged { gaps, run_weights, scaled_total: total })
}

/// Coalesces each maximal run of zeroed edges into a supervertex.
pub fn merge(s: &Necklace, z: &ZeroSet) -> Result<MergedNecklace, FixedAnglesError> {
    check_zero_set(s, z)?;
    let n = s.len();
    let gaps: Vec<usize> = (1..=n).filter(|e| !z.contains(*e)).collect();
    let m = gaps.len();
    let mut entries = Vec::with_capacity(m);
    for t in 0..m {
        let from = gaps[t];
        let to = if t + 1 < m { gaps[t + 1] } else { gaps[0] + n };
        entries.push(s.weight(Substring::new(from, to - from)));
    }
    if m <= 2 {
        Ok(MergedNecklace::Degenerate(entries))
    } else {
        Ok(MergedNecklace::Proper(Necklace::new(entries).expect("entries positive, m >= 3")))
    }
}

/// Outcome of pinning a zero set: either no polygon exists, or a face.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FaceOutcome {
    EmptyFace,
    Face(Face),
}

impl FaceOutcome {
    pub fn into_face(self) -> Option<Face> {
        match self {
            FaceOutcome::EmptyFace => None,
            FaceOutcome::Face(f) => Some(f),
        }
    }
}

/// The face cut out by a zero set, closed and classified.
pub fn face_of_zero_set(s: &Necklace, z: &ZeroSet) -> Result<FaceOutcome, FixedAnglesError> {
    let class = classify_polytope(s);
    if class != PolytopeClass::FullDim {
        return Err(FixedAnglesError::NotFullDimensional(class));
    }
    face_of_zero_set_unchecked(s, z)
}

fn face_of_zero_set_unchecked(s: &Necklace, z: &ZeroSet) -> Result<FaceOutcome, FixedAnglesError> {
    let n = s.len();
    let merged = merge_runs(s, z)?;
    let m = merged.gaps.len();
    let mut tied_run = None;
    for t in 0..m {
        match merged.balance(t) {
            Balance::Heavy => return Ok(FaceOutcome::EmptyFace),
            Balance::Tied => tied_run = Some(t),
            Balance::Light => {}
        }
    }
    if let Some(t) = tied_run {
        // The tied run and its complement form a digon; only the two edges
        // flanking them survive.
        let g1 = merged.gaps[t];
        let g2 = merged.gaps[(t + 1) % m];
        let closed = (1..=n).filter(|&e| e != g1 && e != g2).collect();
        return Ok(FaceOutcome::Face(Face {
            closed_zero_set: closed,
            kind: FaceKind::DigonVertex,
            dim: 0,
        }));
    }
    let dim = m - 3;
    Ok(FaceOutcome::Face(Face {
        closed_zero_set: z.clone(),
        kind: if dim == 0 { FaceKind::TrigonVertex } else { FaceKind::Generic },
        dim,
    }))
}

/// The face lattice of a full-dimensional fixed-angles polytope.
///
/// Stores every nonempty face (including the polytope itself, with empty
/// zero set); the empty face is implicit. `F <= G` holds exactly when the
/// closed zero set of `F` contains that of `G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceLattice {
    n: usize,
    dim: usize,
    faces: Vec<Face>,
    fvector: Vec<usize>,
}

#[derive(Serialize)]
struct FaceJson {
    dim: usize,
    kind: FaceKind,
    zeros: Vec<usize>,
}

#[derive(Serialize)]
struct LatticeJson {
    faces: Vec<FaceJson>,
    fvector: Vec<usize>,
    n: usize,
}

impl FaceLattice {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension of the polytope, `n - 3`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// All stored faces, sorted by `(dim, zeros)`.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Counts of proper faces by dimension, `(f_0, ..., f_{dim-1})`.
    pub fn fvector(&self) -> &[usize] {
        &self.fvector
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(|f| f.dim == 0)
    }

    /// Proper faces of maximal dimension `dim - 1`.
    pub fn facets(&self) -> impl Iterator<Item = &Face> {
        let d = self.dim;
        self.faces.iter().filter(move |f| d >= 1 && f.dim == d - 1)
    }

    /// Containment order: `f <= g` iff `zeros(f)` contains `zeros(g)`.
    pub fn leq(&self, f: &Face, g: &Face) -> bool {
        g.closed_zero_set.is_subset(&f.closed_zero_set)
    }

    pub fn face_by_zeros(&self, zeros: &ZeroSet) -> Option<&Face> {
        self.faces.iter().find(|f| &f.closed_zero_set == zeros)
    }

    /// Number of vertices on each facet, sorted ascending.
    pub fn facet_sizes(&self) -> Vec<usize> {
        let vertices: Vec<&Face> = self.vertices().collect();
        let mut sizes: Vec<usize> = self
            .facets()
            .map(|fac| vertices.iter().filter(|v| self.leq(v, fac)).count())
            .collect();
        sizes.sort_unstable();
        sizes
    }

    /// Number of facets containing the given vertex.
    pub fn incident_facet_count(&self, v: &Face) -> usize {
        self.facets().filter(|fac| self.leq(v, fac)).count()
    }

    /// Relabels every edge index by a rotation of the necklace labels
    /// (edge `e` becomes `((e - 1 + r) mod n) + 1`).
    pub fn relabeled_by_rotation(&self, r: usize) -> FaceLattice {
        let n = self.n;
        let mut faces: Vec<Face> = self
            .faces
            .iter()
            .map(|f| Face {
                closed_zero_set: f.closed_zero_set.iter().map(|e| (e - 1 + r) % n + 1).collect(),
                kind: f.kind,
                dim: f.dim,
            })
            .collect();
        faces.sort_by(|a, b| {
            (a.dim, a.closed_zero_set.to_vec()).cmp(&(b.dim, b.closed_zero_set.to_vec()))
        });
        FaceLattice { n, dim: self.dim, faces, fvector: self.fvector.clone() }
    }

    /// Documented JSON form: `{"faces": [{"dim", "kind", "zeros"}...],
    /// "fvector": [...], "n": ...}` with sorted keys and faces sorted by
    /// `(dim, zeros)`; identical inputs yield identical bytes.
    pub fn to_json_string(&self) -> String {
        let json = LatticeJson {
            faces: self
                .faces
                .iter()
                .map(|f| FaceJson {
                    dim: f.dim,
                    kind: f.kind,
                    zeros: f.closed_zero_set.to_vec(),
                })
                .collect(),
            fvector: self.fvector.clone(),
            n: self.n,
        };
        serde_json::to_string(&json).expect("lattice serialization cannot fail")
    }
}

/// Enumerates every nonempty face by exhausting zero sets, deduplicating
/// by closure. Supersets of an empty zero set are pruned.
pub fn enumerate_faces(s: &Necklace) -> Result<FaceLattice, FixedAnglesError> {
    enumerate_faces_capped(s, DEFAULT_ENUM_CAP)
}

pub fn enumerate_faces_capped(s: &Necklace, cap: usize) -> Result<FaceLattice, FixedAnglesError> {
    let n = s.len();
    if n > cap {
        return Err(FixedAnglesError::CapExceeded { n, cap });
    }
    let class = classify_polytope(s);
    if class != PolytopeClass::FullDim {
        return Err(FixedAnglesError::NotFullDimensional(class));
    }
    let mut found: BTreeMap<Vec<usize>, Face> = BTreeMap::new();
    let mut stack: Vec<usize> = Vec::new();
    collect_faces(s, 1, &mut stack, &mut found)?;
    let mut faces: Vec<Face> = found.into_values().collect();
    faces.sort_by(|a, b| {
        (a.dim, a.closed_zero_set.to_vec()).cmp(&(b.dim, b.closed_zero_set.to_vec()))
    });
    let dim = n - 3;
    let mut fvector = vec![0usize; dim];
    for f in &faces {
        if f.dim < dim {
            fvector[f.dim] += 1;
        }
    }
    Ok(FaceLattice { n, dim, faces, fvector })
}

fn collect_faces(
    s: &Necklace,
    next_edge: usize,
    chosen: &mut Vec<usize>,
    found: &mut BTreeMap<Vec<usize>, Face>,
) -> Result<(), FixedAnglesError> {
    let z = ZeroSet::new(chosen.iter().copied());
    if z.len() < s.len() {
        match face_of_zero_set_unchecked(s, &z)? {
            // Supersets of an empty zero set stay empty: prune this branch.
            FaceOutcome::EmptyFace => return Ok(()),
            FaceOutcome::Face(face) => {
                if next_edge > s.len() {
                    found.entry(face.closed_zero_set.to_vec()).or_insert(face);
                    return Ok(());
                }
            }
        }
    } else {
        return Ok(());
    }
    collect_faces(s, next_edge + 1, chosen, found)?;
    chosen.push(next_edge);
    collect_faces(s, next_edge + 1, chosen, found)?;
    chosen.pop();
    Ok(())
}

/// Gap triples `(i, j, k)` whose three cut substrings are all light; each
/// is a simple vertex where edges `i, j, k` extend to a triangle.
pub fn trigon_vertices(s: &Necklace) -> Result<Vec<(usize, usize, usize)>, FixedAnglesError> {
    let class = classify_polytope(s);
    if class != PolytopeClass::FullDim {
        return Err(FixedAnglesError::NotFullDimensional(class));
    }
    let n = s.len();
    let (scaled, total) = s.scaled_integer_entries();
    let mut prefix = vec![BigInt::zero()];
    for v in 0..n {
        let next = &prefix[v] + &scaled[v];
        prefix.push(next);
    }
    // Weight of vertices a..b-1 for 1 <= a < b <= a + n.
    let span = |a: usize, b: usize| -> BigInt {
        if b <= n + 1 {
            &prefix[b - 1] - &prefix[a - 1]
        } else {
            &prefix[n] - &prefix[a - 1] + &prefix[b - 1 - n]
        }
    };
    let light = |w: BigInt| -> bool { w * 2i32 < total };
    let mut triples = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            if !light(span(i, j)) {
                continue;
            }
            for k in j + 1..=n {
                if light(span(j, k)) && light(span(k, i + n)) {
                    triples.push((i, j, k));
                }
            }
        }
    }
    Ok(triples)
}

/// One digon vertex per substring tie: only the two edges flanking the
/// tied substrings survive.
pub fn digon_vertices(s: &Necklace) -> Result<Vec<(TieRecord, Face)>, FixedAnglesError> {
    let class = classify_polytope(s);
    if class != PolytopeClass::FullDim {
        return Err(FixedAnglesError::NotFullDimensional(class));
    }
    let n = s.len();
    Ok(s.substring_ties()
        .into_iter()
        .map(|tie| {
            let g1 = s.label(tie.substring.start as i64);
            let g2 = s.label(tie.substring.start as i64 + tie.substring.len as i64);
            let closed = (1..=n).filter(|&e| e != g1 && e != g2).collect();
            let face = Face { closed_zero_set: closed, kind: FaceKind::DigonVertex, dim: 0 };
            (tie, face)
        })
        .collect())
}

/// The combinatorial shape `Delta_a x Delta_b` of a vertex figure.
/// `a = -1` marks an empty factor (an isolated vertex); a zero factor is
/// a point, so `(a, 0)` is the simplex `Delta_a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VertexFigureShape {
    pub a: i64,
    pub b: i64,
}

impl VertexFigureShape {
    /// Factors sorted ascending, for shape comparisons.
    pub fn normalized(&self) -> (i64, i64) {
        (self.a.min(self.b), self.a.max(self.b))
    }

    pub fn is_simplex(&self) -> bool {
        self.a <= 0 || self.b <= 0
    }

    /// Facets of the ambient polytope incident to the vertex.
    pub fn incident_facets(&self, n: usize) -> usize {
        if self.a >= 1 && self.b >= 1 {
            (self.a + self.b + 2) as usize
        } else {
            n - 3
        }
    }
}

impl std::fmt::Display for VertexFigureShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.a == -1 || self.b == -1 {
            write!(f, "empty")
        } else if self.a == 0 {
            write!(f, "Delta_{}", self.b)
        } else if self.b == 0 {
            write!(f, "Delta_{}", self.a)
        } else {
            write!(f, "Delta_{} x Delta_{}", self.a, self.b)
        }
    }
}

/// Vertex figure of a vertex of the polytope: `Delta_{n-4}` at a trigon
/// vertex, `Delta_{w-2} x Delta_{n-w-2}` at a digon vertex of width `w`.
pub fn vertex_figure(s: &Necklace, v: &Face) -> Result<VertexFigureShape, FixedAnglesError> {
    if v.dim != 0 {
        return Err(FixedAnglesError::NotAVertex(v.closed_zero_set.to_vec()));
    }
    let n = s.len();
    match v.kind {
        FaceKind::TrigonVertex => Ok(VertexFigureShape { a: n as i64 - 4, b: 0 }),
        FaceKind::DigonVertex => {
            let gaps: Vec<usize> = (1..=n).filter(|&e| !v.closed_zero_set.contains(e)).collect();
            if gaps.len() != 2 {
                return Err(FixedAnglesError::NotAVertex(v.closed_zero_set.to_vec()));
            }
            let side = gaps[1] - gaps[0];
            let w = side.min(n - side);
            Ok(VertexFigureShape { a: w as i64 - 2, b: (n - w) as i64 - 2 })
        }
        FaceKind::Generic => Err(FixedAnglesError::NotAVertex(v.closed_zero_set.to_vec())),
    }
}

/// True when every vertex is simple (lies on exactly `n - 3` facets),
/// i.e. when no substring tie has width 3 or more.
pub fn is_simple(s: &Necklace) -> Result<bool, FixedAnglesError> {
    let class = classify_polytope(s);
    if class != PolytopeClass::FullDim {
        return Err(FixedAnglesError::NotFullDimensional(class));
    }
    Ok(s.substring_ties().iter().all(|t| t.width < 3))
}

/// A necklace with one entry left free, for sweeping over that entry.
#[derive(Debug, Clone)]
pub struct SweepTemplate {
    fixed: Vec<Option<Rational>>,
    marked: usize,
}

/// Digon transition at a critical value: a tie of width `w` turns a face
/// into a digon vertex that reopens as either a `Delta_{w-2}` or a
/// `Delta_{n-w-2}`, depending on the direction of the perturbation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transition {
    pub width: usize,
    pub simplex_pair: (i64, i64),
}

/// Snapshot of the polytope at one swept value.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub value: Rational,
    pub class: PolytopeClass,
    pub fvector: Option<Vec<usize>>,
    pub facet_sizes: Option<Vec<usize>>,
    pub ties: Vec<TieRecord>,
    pub transitions: Vec<Transition>,
}

impl SweepTemplate {
    /// Builds from entries where exactly one is `None` (the marked entry).
    pub fn new(fixed: Vec<Option<Rational>>) -> Result<Self, FixedAnglesError> {
        let marks = fixed.iter().filter(|e| e.is_none()).count();
        if marks != 1 {
            return Err(FixedAnglesError::BadTemplateMark(marks));
        }
        if fixed.len() < 3 {
            return Err(NecklaceError::TooShort(fixed.len()).into());
        }
        for (i, e) in fixed.iter().enumerate() {
            if let Some(v) = e {
                if *v <= Rational::zero() {
                    return Err(NecklaceError::NonPositiveEntry { index: i + 1 }.into());
                }
            }
        }
        let marked = fixed.iter().position(|e| e.is_none()).unwrap() + 1;
        Ok(SweepTemplate { fixed, marked })
    }

    /// Parses the comma-separated form with `?` marking the swept entry,
    /// e.g. `1,3,1,4,2,?`.
    pub fn parse(text: &str) -> Result<Self, FixedAnglesError> {
        let mut fixed = Vec::new();
        for raw in text.split(',') {
            if raw.trim() == "?" {
                fixed.push(None);
            } else {
                fixed.push(Some(crate::necklace::parse_rational_token(raw)?));
            }
        }
        Self::new(fixed)
    }

    pub fn len(&self) -> usize {
        self.fixed.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// 1-based position of the marked entry.
    pub fn marked_index(&self) -> usize {
        self.marked
    }

    /// Instantiates the necklace at a value of the marked entry.
    pub fn with_value(&self, value: &Rational) -> Result<Necklace, FixedAnglesError> {
        if *value <= Rational::zero() {
            return Err(FixedAnglesError::NonPositiveSweepValue(
                crate::necklace::format_rational(value),
            ));
        }
        let entries = self
            .fixed
            .iter()
            .map(|e| e.clone().unwrap_or_else(|| value.clone()))
            .collect();
        Ok(Necklace::new(entries)?)
    }

    /// Every positive value of the marked entry at which some substring tie
    /// exists, found by solving the linear tie equation per substring.
    pub fn critical_values(&self) -> Vec<Rational> {
        let n = self.fixed.len();
        let fixed_total: Rational = self.fixed.iter().flatten().cloned().sum();
        let mut values: BTreeSet<Rational> = BTreeSet::new();
        for start in 1..=n {
            for len in 1..n {
                let mut sum = Rational::zero();
                let mut contains_marked = false;
                for i in 0..len {
                    let label = (start - 1 + i) % n + 1;
                    match &self.fixed[label - 1] {
                        Some(v) => sum += v,
                        None => contains_marked = true,
                    }
                }
                // Tie: weight = S/2 with S = fixed_total + sigma.
                let sigma = if contains_marked {
                    &fixed_total - &sum - &sum
                } else {
                    &sum + &sum - &fixed_total
                };
                if sigma > Rational::zero() {
                    values.insert(sigma);
                }
            }
        }
        values.into_iter().collect()
    }

    /// Critical values within the closed interval `[lo, hi]`.
    pub fn critical_values_between(&self, lo: &Rational, hi: &Rational) -> Vec<Rational> {
        self.critical_values().into_iter().filter(|v| v >= lo && v <= hi).collect()
    }
}

/// Reports the polytope at each requested value of the marked entry.
pub fn sweep(
    template: &SweepTemplate,
    values: &[Rational],
) -> Result<Vec<SweepReport>, FixedAnglesError> {
    let critical: BTreeSet<Rational> = template.critical_values().into_iter().collect();
    values.iter().map(|v| sweep_at(template, v, critical.contains(v))).collect()
}

fn sweep_at(
    template: &SweepTemplate,
    value: &Rational,
    at_critical: bool,
) -> Result<SweepReport, FixedAnglesError> {
    let s = template.with_value(value)?;
    let n = s.len();
    let class = classify_polytope(&s);
    let ties = s.substring_ties();
    let transitions = if at_critical {
        ties.iter()
            .map(|t| Transition {
                width: t.width,
                simplex_pair: (t.width as i64 - 2, (n - t.width) as i64 - 2),
            })
            .collect()
    } else {
        Vec::new()
    };
    let (fvector, facet_sizes) = if class == PolytopeClass::FullDim {
        let lattice = enumerate_faces(&s)?;
        (Some(lattice.fvector().to_vec()), Some(lattice.facet_sizes()))
    } else {
        (None, None)
    };
    Ok(SweepReport { value: value.clone(), class, fvector, facet_sizes, ties, transitions })
}

/// Reports at `lo`, `hi`, every critical value between them, and the
/// midpoint of every subinterval; the combinatorial type is constant
/// between consecutive critical values, so midpoints represent intervals.
pub fn sweep_intervals(
    template: &SweepTemplate,
    lo: &Rational,
    hi: &Rational,
) -> Result<Vec<SweepReport>, FixedAnglesError> {
    let two = Rational::from_integer(2.into());
    let critical = template.critical_values_between(lo, hi);
    let mut points: BTreeSet<Rational> = BTreeSet::new();
    points.insert(lo.clone());
    points.insert(hi.clone());
    for c in &critical {
        points.insert(c.clone());
    }
    let sorted: Vec<Rational> = points.iter().cloned().collect();
    for pair in sorted.windows(2) {
        points.insert((&pair[0] + &pair[1]) / &two);
    }
    let values: Vec<Rational> = points.into_iter().collect();
    sweep(template, &values)
}
