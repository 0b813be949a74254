//! Anti-isomorphism between fixed-angles face lattices and cyclic
//! polytope lattices.
//!
//! Faces are compared through their facet-membership signatures: a face of
//! the fixed-angles polytope is identified with the set of facets
//! containing it, and a candidate facet-to-vertex bijection is a witness
//! exactly when it carries the signature family onto the cyclic face
//! family. For odd `n` the explicit map `i -> -2i (mod n)` is checked
//! directly; for even `n` no closed-form map exists and a pruned
//! backtracking search finds (or counts) witnesses.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::cyclic::{self, CyclicError, SimplicialLattice};
use crate::fixed_angles::{self, FaceLattice, FixedAnglesError};
use crate::necklace::Necklace;

#[derive(Debug, Error)]
pub enum DualityError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("size mismatch: polytope has {a_facets} facets, counterpart has {b_labels} labels")]
    SizeMismatch { a_facets: usize, b_labels: usize },
    #[error(transparent)]
    FixedAngles(#[from] FixedAnglesError),
    #[error(transparent)]
    Cyclic(#[from] CyclicError),
}

/// Facet-to-vertex assignment: facet of edge `i` maps to vertex label
/// `mapping[i - 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AtomCoatomMap {
    pub n: usize,
    pub mapping: Vec<usize>,
}

impl AtomCoatomMap {
    /// The explicit odd-`n` map `i -> -2i (mod n)`, a bijection since
    /// `gcd(2, n) = 1`.
    pub fn neg_two(n: usize) -> Result<Self, DualityError> {
        if n.is_multiple_of(2) {
            return Err(DualityError::Precondition(format!(
                "the -2 map needs odd n, got {n}"
            )));
        }
        let mapping = (1..=n).map(|i| facet_vertex_map_unchecked(n, i)).collect();
        Ok(AtomCoatomMap { n, mapping })
    }

    pub fn from_permutation(mapping: Vec<usize>) -> Result<Self, DualityError> {
        let n = mapping.len();
        let seen: BTreeSet<usize> = mapping.iter().copied().collect();
        if seen.len() != n || seen.iter().any(|&v| v < 1 || v > n) {
            return Err(DualityError::Precondition(format!(
                "mapping {mapping:?} is not a permutation of 1..={n}"
            )));
        }
        Ok(AtomCoatomMap { n, mapping })
    }
}

/// `i' = -2i mod n`, represented in `1..=n`.
pub fn facet_vertex_map(n: usize, i: usize) -> Result<usize, DualityError> {
    if n.is_multiple_of(2) {
        return Err(DualityError::Precondition(format!("the -2 map needs odd n, got {n}")));
    }
    if i < 1 || i > n {
        return Err(DualityError::Precondition(format!("index {i} outside 1..={n}")));
    }
    Ok(facet_vertex_map_unchecked(n, i))
}

fn facet_vertex_map_unchecked(n: usize, i: usize) -> usize {
    let r = (-2 * i as i64).rem_euclid(n as i64) as usize;
    if r == 0 {
        n
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DualityMethod {
    ExplicitOddMap,
    EvenReduction,
    ExhaustiveSearch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FailureCertificate {
    /// Total face counts differ, so no bijection can exist.
    FaceCountMismatch { polytope_faces: usize, counterpart_faces: usize },
    /// A facet set whose intersection-face status disagrees under the
    /// checked map: it meets in a nonempty face on exactly one side.
    Disagreement {
        facet_edges: Vec<usize>,
        meets_in_polytope: bool,
        face_of_counterpart: bool,
    },
    /// The lattice does not match the reference necklace `[1, ..., 1, 2]`
    /// after rotating the heavy pole into the last position.
    ReductionMismatch { rotation: usize },
    /// Pruned exhaustive search ran out of candidate bijections.
    SearchExhausted,
}

/// Outcome of a duality check, with the witness bijection (facet edge
/// `i` to vertex label `witness[i - 1]`) or a failure certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualityReport {
    pub verdict: bool,
    pub method: DualityMethod,
    pub witness: Option<Vec<usize>>,
    pub failure_certificate: Option<FailureCertificate>,
}

impl DualityReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }
}

/// A family of faces over labels `1..=labels`, as bitmasks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceFamily {
    pub labels: usize,
    pub faces: BTreeSet<u32>,
}

impl From<&SimplicialLattice> for FaceFamily {
    fn from(lattice: &SimplicialLattice) -> Self {
        FaceFamily { labels: lattice.m(), faces: lattice.face_masks().clone() }
    }
}

/// The fixed-angles side, reduced to facet-membership signatures.
struct PolytopeSide {
    /// Edge label(s) of each facet, by facet position.
    facet_edges: Vec<Vec<usize>>,
    /// One mask per proper nonempty face: which facets contain it.
    signatures: Vec<u32>,
}

fn polytope_signatures(lattice: &FaceLattice) -> PolytopeSide {
    let facets: Vec<&fixed_angles::Face> = lattice.facets().collect();
    let facet_edges = facets.iter().map(|f| f.closed_zero_set.to_vec()).collect();
    let signatures = lattice
        .faces()
        .iter()
        .filter(|f| f.dim < lattice.dim())
        .map(|f| {
            let mut mask = 0u32;
            for (p, facet) in facets.iter().enumerate() {
                if lattice.leq(f, facet) {
                    mask |= 1 << p;
                }
            }
            mask
        })
        .collect();
    PolytopeSide { facet_edges, signatures }
}

/// The formal dual of a face lattice: its facet-membership signatures read
/// as a face family over the facet positions. Any lattice is
/// anti-isomorphic to its own formal dual via the identity assignment.
pub fn formal_dual(lattice: &FaceLattice) -> FaceFamily {
    let side = polytope_signatures(lattice);
    FaceFamily { labels: side.facet_edges.len(), faces: side.signatures.into_iter().collect() }
}

fn apply_map(mask: u32, images: &[usize]) -> u32 {
    let mut out = 0u32;
    for (p, &image) in images.iter().enumerate() {
        if mask >> p & 1 == 1 {
            out |= 1 << (image - 1);
        }
    }
    out
}

/// Checks one candidate assignment; `Ok(())` means it is a witness.
fn check_map(
    side: &PolytopeSide,
    family: &FaceFamily,
    images: &[usize],
) -> Result<(), FailureCertificate> {
    if side.signatures.len() != family.faces.len() {
        return Err(FailureCertificate::FaceCountMismatch {
            polytope_faces: side.signatures.len(),
            counterpart_faces: family.faces.len(),
        });
    }
    let mut seen: BTreeSet<u32> = BTreeSet::new();
    for &sig in &side.signatures {
        let image = apply_map(sig, images);
        if !family.faces.contains(&image) {
            return Err(FailureCertificate::Disagreement {
                facet_edges: mask_edges(sig, &side.facet_edges),
                meets_in_polytope: true,
                face_of_counterpart: false,
            });
        }
        seen.insert(image);
    }
    if seen.len() != family.faces.len() {
        let missing = family.faces.iter().find(|f| !seen.contains(f)).copied().unwrap();
        // Pull the unmatched counterpart face back to facet edges.
        let mut sig = 0u32;
        for (p, &image) in images.iter().enumerate() {
            if missing >> (image - 1) & 1 == 1 {
                sig |= 1 << p;
            }
        }
        return Err(FailureCertificate::Disagreement {
            facet_edges: mask_edges(sig, &side.facet_edges),
            meets_in_polytope: false,
            face_of_counterpart: true,
        });
    }
    Ok(())
}

fn mask_edges(mask: u32, facet_edges: &[Vec<usize>]) -> Vec<usize> {
    let mut edges = Vec::new();
    for (p, labels) in facet_edges.iter().enumerate() {
        if mask >> p & 1 == 1 {
            edges.extend(labels.iter().copied());
        }
    }
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// Pruned backtracking over facet-to-label bijections. Candidates are
/// filtered by per-facet and per-pair face-membership counts; assignments
/// are explored in increasing label order, so the first witness found is
/// the lexicographically least one.
fn search_witnesses(side: &PolytopeSide, family: &FaceFamily, want_all: bool) -> Vec<Vec<usize>> {
    let n = side.facet_edges.len();
    let mut count_a = vec![0usize; n];
    let mut pair_a = vec![vec![0usize; n]; n];
    for &sig in &side.signatures {
        for p in 0..n {
            if sig >> p & 1 == 0 {
                continue;
            }
            count_a[p] += 1;
            for q in p + 1..n {
                if sig >> q & 1 == 1 {
                    pair_a[p][q] += 1;
                    pair_a[q][p] += 1;
                }
            }
        }
    }
    let m = family.labels;
    let mut count_b = vec![0usize; m];
    let mut pair_b = vec![vec![0usize; m]; m];
    for &face in &family.faces {
        for u in 0..m {
            if face >> u & 1 == 0 {
                continue;
            }
            count_b[u] += 1;
            for v in u + 1..m {
                if face >> v & 1 == 1 {
                    pair_b[u][v] += 1;
                    pair_b[v][u] += 1;
                }
            }
        }
    }

    struct Search<'s> {
        side: &'s PolytopeSide,
        family: &'s FaceFamily,
        count_a: &'s [usize],
        pair_a: &'s [Vec<usize>],
        count_b: &'s [usize],
        pair_b: &'s [Vec<usize>],
        images: Vec<usize>,
        used: Vec<bool>,
        witnesses: Vec<Vec<usize>>,
        want_all: bool,
    }

    impl Search<'_> {
        fn run(&mut self, pos: usize) -> bool {
            let n = self.images.len();
            if pos == n {
                if check_map(self.side, self.family, &self.images).is_ok() {
                    self.witnesses.push(self.images.clone());
                    return !self.want_all;
                }
                return false;
            }
            for label in 1..=self.family.labels {
                if self.used[label - 1] || self.count_a[pos] != self.count_b[label - 1] {
                    continue;
                }
                if (0..pos).any(|prev| {
                    self.pair_a[pos][prev] != self.pair_b[label - 1][self.images[prev] - 1]
                }) {
                    continue;
                }
                self.images[pos] = label;
                self.used[label - 1] = true;
                if self.run(pos + 1) {
                    return true;
                }
                self.used[label - 1] = false;
            }
            false
        }
    }

    let mut search = Search {
        side,
        family,
        count_a: &count_a,
        pair_a: &pair_a,
        count_b: &count_b,
        pair_b: &pair_b,
        images: vec![0usize; n],
        used: vec![false; m],
        witnesses: Vec::new(),
        want_all,
    };
    search.run(0);
    search.witnesses
}

/// Generic anti-isomorphism check of a fixed-angles lattice against a face
/// family. With a seed the seed alone is checked; otherwise a pruned
/// exhaustive search looks for the lexicographically least witness.
pub fn anti_isomorphic_family(
    lattice: &FaceLattice,
    family: &FaceFamily,
    seed: Option<&AtomCoatomMap>,
) -> Result<DualityReport, DualityError> {
    let side = polytope_signatures(lattice);
    let n = side.facet_edges.len();
    if n != family.labels {
        return Err(DualityError::SizeMismatch { a_facets: n, b_labels: family.labels });
    }
    match seed {
        Some(map) => {
            if map.mapping.len() != n {
                return Err(DualityError::SizeMismatch {
                    a_facets: n,
                    b_labels: map.mapping.len(),
                });
            }
            match check_map(&side, family, &map.mapping) {
                Ok(()) => Ok(DualityReport {
                    verdict: true,
                    method: DualityMethod::ExplicitOddMap,
                    witness: Some(map.mapping.clone()),
                    failure_certificate: None,
                }),
                Err(cert) => Ok(DualityReport {
                    verdict: false,
                    method: DualityMethod::ExplicitOddMap,
                    witness: None,
                    failure_certificate: Some(cert),
                }),
            }
        }
        None => {
            let witnesses = search_witnesses(&side, family, false);
            match witnesses.into_iter().next() {
                Some(witness) => Ok(DualityReport {
                    verdict: true,
                    method: DualityMethod::ExhaustiveSearch,
                    witness: Some(witness),
                    failure_certificate: None,
                }),
                None => {
                    let cert = if side.signatures.len() != family.faces.len() {
                        FailureCertificate::FaceCountMismatch {
                            polytope_faces: side.signatures.len(),
                            counterpart_faces: family.faces.len(),
                        }
                    } else {
                        FailureCertificate::SearchExhausted
                    };
                    Ok(DualityReport {
                        verdict: false,
                        method: DualityMethod::ExhaustiveSearch,
                        witness: None,
                        failure_certificate: Some(cert),
                    })
                }
            }
        }
    }
}

/// Anti-isomorphism check against a cyclic (simplicial) lattice.
pub fn anti_isomorphic(
    lattice: &FaceLattice,
    cyclic: &SimplicialLattice,
    seed: Option<&AtomCoatomMap>,
) -> Result<DualityReport, DualityError> {
    anti_isomorphic_family(lattice, &FaceFamily::from(cyclic), seed)
}

/// Every anti-isomorphism witness, in lexicographic order.
pub fn anti_isomorphism_witnesses(
    lattice: &FaceLattice,
    cyclic: &SimplicialLattice,
) -> Result<Vec<Vec<usize>>, DualityError> {
    let side = polytope_signatures(lattice);
    let family = FaceFamily::from(cyclic);
    if side.facet_edges.len() != family.labels {
        return Err(DualityError::SizeMismatch {
            a_facets: side.facet_edges.len(),
            b_labels: family.labels,
        });
    }
    Ok(search_witnesses(&side, &family, true))
}

/// Odd-`n` duality: checks the explicit `-2` facet-to-vertex map between
/// the fixed-angles lattice of a majority-dominant necklace and
/// `C_{n-3}(n)`.
pub fn verify_dual_cyclic_odd(s: &Necklace) -> Result<DualityReport, DualityError> {
    let n = s.len();
    if n.is_multiple_of(2) || n < 5 {
        return Err(DualityError::Precondition(format!("need odd n >= 5, got {n}")));
    }
    if !s.is_majority_dominant() {
        return Err(DualityError::Precondition(format!("necklace {s} is not majority dominant")));
    }
    let lattice = fixed_angles::enumerate_faces(s)?;
    let cyclic_lattice = cyclic::face_lattice(n - 3, n)?;
    let map = AtomCoatomMap::neg_two(n)?;
    anti_isomorphic(&lattice, &cyclic_lattice, Some(&map))
}

/// Even-`n` duality: searches for an anti-isomorphism witness onto
/// `C_{n-3}(n)` and, when the necklace has dipole tie-breaking,
/// cross-checks that its lattice reduces to that of `[1, ..., 1, 2]` by
/// rotating the heavy pole into the last position.
pub fn verify_dual_cyclic_even(s: &Necklace) -> Result<DualityReport, DualityError> {
    let n = s.len();
    if !n.is_multiple_of(2) || n < 4 {
        return Err(DualityError::Precondition(format!("need even n >= 4, got {n}")));
    }
    if !s.is_majority_dominant() {
        return Err(DualityError::Precondition(format!("necklace {s} is not majority dominant")));
    }
    let dipole = s.dipole_tie_breaking().expect("n is even");
    let lattice = fixed_angles::enumerate_faces(s)?;
    let cyclic_lattice = cyclic::face_lattice(n - 3, n)?;
    let mut report = anti_isomorphic(&lattice, &cyclic_lattice, None)?;
    if let Some((_, heavy)) = dipole {
        report.method = DualityMethod::EvenReduction;
        let mut reference_entries = vec![1i64; n];
        reference_entries[n - 1] = 2;
        let reference = Necklace::from_ints(&reference_entries).expect("valid reference");
        let reference_lattice = fixed_angles::enumerate_faces(&reference)?;
        let rotation = (n - heavy) % n;
        if lattice.relabeled_by_rotation(rotation) != reference_lattice {
            report.verdict = false;
            report.witness = None;
            report.failure_certificate = Some(FailureCertificate::ReductionMismatch { rotation });
        }
    }
    Ok(report)
}
