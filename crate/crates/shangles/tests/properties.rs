//! Cross-module invariants on randomly generated necklaces.

mod common;

use rand::rngs::StdRng;
use rand::SeedableRng;

use common::{random_dipole, random_full_dim, random_majority_dominant};
use shangles::duality;
use shangles::fixed_angles::{enumerate_faces, face_of_zero_set, FaceKind, FaceOutcome, ZeroSet};
use shangles::geometry::{self, Feasibility, Tolerances};

#[test]
fn random_dipole_necklaces_are_dual_cyclic() {
    let mut rng = StdRng::seed_from_u64(0x9e3779b9);
    for n in [6usize, 8] {
        for trial in 0..25 {
            let s = random_dipole(&mut rng, n);
            let report = duality::verify_dual_cyclic_even(&s).unwrap();
            assert!(report.verdict, "n = {n}, trial {trial}, necklace {s}");
            assert_eq!(report.method, duality::DualityMethod::EvenReduction);
        }
    }
}

#[test]
fn numeric_feasibility_matches_combinatorics() {
    let mut rng = StdRng::seed_from_u64(0xfea51b1e);
    for n in 5usize..=8 {
        for _ in 0..3 {
            let s = random_full_dim(&mut rng, n);
            let half = s.half_total();
            for mask in 0u32..(1 << n) - 1 {
                let z = ZeroSet::new((1..=n).filter(|&e| mask >> (e - 1) & 1 == 1));
                let numeric = geometry::feasibility_witness(&s, &z).unwrap();
                match face_of_zero_set(&s, &z).unwrap() {
                    FaceOutcome::EmptyFace => match numeric {
                        Feasibility::Infeasible { weight, .. } => {
                            // The offending run must exceed S/2 exactly.
                            assert!(weight > half, "necklace {s}, zeros {z:?}");
                        }
                        Feasibility::Witness(_) => {
                            panic!("witness found for empty face of {s}, zeros {z:?}")
                        }
                    },
                    FaceOutcome::Face(face) => {
                        let p = match numeric {
                            Feasibility::Witness(p) => p,
                            Feasibility::Infeasible { .. } => {
                                panic!("no witness for face of {s}, zeros {z:?}")
                            }
                        };
                        assert!(p.closure_residual() <= 1e-9 * p.perimeter());
                        if face.kind == FaceKind::Generic {
                            // Surviving edges of a generic face stay
                            // strictly positive in the tangential witness.
                            for e in 1..=n {
                                if !z.contains(e) {
                                    assert!(p.lengths[e - 1] > 0.0);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn random_realizations_meet_tolerances() {
    let mut rng = StdRng::seed_from_u64(0x0c105e);
    for n in 4usize..=8 {
        for _ in 0..5 {
            let s = random_full_dim(&mut rng, n);
            assert_eq!(geometry::closure_matrix_rank(&s, &Tolerances::default()), 2);

            let interior = geometry::tangential_polygon(&s).unwrap();
            assert!(interior.closure_residual() <= 1e-12 * interior.perimeter().max(1.0));

            let lattice = enumerate_faces(&s).unwrap();
            for v in lattice.vertices() {
                let p = geometry::vertex_realization(&s, v).unwrap();
                assert!(p.lengths.iter().all(|&l| l >= 0.0));
                assert!((p.perimeter() - 1.0).abs() <= 1e-12);
                assert!(p.closure_residual() <= 1e-9 * p.perimeter());
            }
        }
    }
}

#[test]
fn majority_dominance_survives_relabeling() {
    let mut rng = StdRng::seed_from_u64(0x5eed_aaaa);
    for n in 5usize..=9 {
        let s = random_majority_dominant(&mut rng, n);
        for r in 0..n {
            assert!(s.rotated(r).is_majority_dominant());
            assert!(s.rotated(r).reversed().is_majority_dominant());
        }
    }
}

/// As the boosted entry of `[1,1,1,1,1,1+e]` drops to the equiangular
/// hexagon, three edges of the polytope shrink to the digon vertices of
/// the diametral ties. Those edges are pairwise non-adjacent, and each
/// facet of the dual-cyclic polytope carries a fixed number of them: two
/// per pentagon, one per quadrilateral, none per triangle.
#[test]
fn dihedral_degeneration_edges() {
    use shangles::necklace::{Necklace, Rational};

    let eps = Rational::new(1.into(), 2.into());
    let mut entries = vec![Rational::from_integer(1.into()); 6];
    entries[5] += eps;
    let perturbed = Necklace::new(entries).unwrap();
    let lattice = enumerate_faces(&perturbed).unwrap();

    // The diametral ties of the equiangular hexagon start at 1, 2, 3 and
    // cover three vertices each; the corresponding shrinking 1-face of
    // the perturbed polytope zeroes the two edges inside the tied run.
    let shrinking: Vec<_> = (1..=3usize)
        .map(|a| {
            let z = ZeroSet::new([a + 1, a + 2]);
            let face = lattice.face_by_zeros(&z).expect("shrinking edge exists");
            assert_eq!(face.dim, 1);
            face.clone()
        })
        .collect();

    // Pairwise non-adjacent: no common vertex.
    for i in 0..3 {
        for j in i + 1..3 {
            let common = lattice
                .vertices()
                .filter(|v| lattice.leq(v, &shrinking[i]) && lattice.leq(v, &shrinking[j]))
                .count();
            assert_eq!(common, 0, "edges {i} and {j} share a vertex");
        }
    }

    // Per-facet counts by facet size.
    let vertices: Vec<_> = lattice.vertices().collect();
    for facet in lattice.facets() {
        let size = vertices.iter().filter(|v| lattice.leq(v, facet)).count();
        let carried =
            shrinking.iter().filter(|edge| lattice.leq(edge, facet)).count();
        let expected = match size {
            3 => 0,
            4 => 1,
            5 => 2,
            other => panic!("unexpected facet size {other}"),
        };
        assert_eq!(carried, expected, "facet {:?}", facet.closed_zero_set.to_vec());
    }
}
