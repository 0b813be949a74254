//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion report.

mod common;

use rand::rngs::StdRng;
use rand::SeedableRng;

use common::{random_full_dim, random_majority_dominant, rational};
use shangles::cyclic;
use shangles::duality;
use shangles::fixed_angles::{
    self, classify_polytope, digon_vertices, enumerate_faces, face_of_zero_set, trigon_vertices,
    vertex_figure, FaceOutcome, PolytopeClass, SweepTemplate, ZeroSet,
};
use shangles::geometry;
use shangles::necklace::Necklace;
use shangles::scmap;
use shangles::tours;

fn ints(entries: &[i64]) -> Necklace {
    Necklace::from_ints(entries).unwrap()
}

#[test]
fn criterion_01_figure_one_quadrilateral() {
    let s = ints(&[1, 3, 2, 4, 5]);
    let lattice = enumerate_faces(&s).unwrap();
    assert_eq!(lattice.fvector(), &[4, 4]);

    // Edge 5 (between the two heaviest shangles) never shrinks: no facet.
    let facet_edges: Vec<Vec<usize>> =
        lattice.facets().map(|f| f.closed_zero_set.to_vec()).collect();
    assert_eq!(facet_edges, vec![vec![1], vec![2], vec![3], vec![4]]);
    assert_eq!(
        face_of_zero_set(&s, &ZeroSet::new([5])).unwrap(),
        FaceOutcome::EmptyFace
    );

    let trigons = trigon_vertices(&s).unwrap();
    assert_eq!(trigons.len(), 4);
    for v in lattice.vertices() {
        let p = geometry::vertex_realization(&s, v).unwrap();
        assert!((p.perimeter() - 1.0).abs() <= 1e-12);
        assert!(p.closure_residual() <= 1e-9);
        assert_eq!(p.lengths.iter().filter(|&&l| l > 0.0).count(), 3);
    }
    println!("criterion 1: PASS - quadrilateral fvector (4,4), edge 5 facetless, 4 unit-perimeter trigon realizations");
}

#[test]
fn criterion_02_sweep_sequence() {
    let template = SweepTemplate::parse("1,3,1,4,2,?").unwrap();
    assert_eq!(
        template.critical_values_between(&rational(4, 1), &rational(12, 1)),
        vec![rational(5, 1), rational(7, 1), rational(9, 1), rational(11, 1)]
    );

    let at = |v: i64| -> fixed_angles::SweepReport {
        fixed_angles::sweep(&template, &[rational(v, 1)]).unwrap().remove(0)
    };

    let cube = at(4);
    assert_eq!(cube.fvector.as_deref(), Some(&[8, 12, 6][..]));
    assert_eq!(cube.facet_sizes.as_deref(), Some(&[4, 4, 4, 4, 4, 4][..]));

    let dual_cyclic = at(6);
    assert_eq!(dual_cyclic.fvector.as_deref(), Some(&[8, 12, 6][..]));
    assert_eq!(dual_cyclic.facet_sizes.as_deref(), Some(&[3, 3, 4, 4, 5, 5][..]));
    assert!(duality::verify_dual_cyclic_even(&ints(&[1, 3, 1, 4, 2, 6])).unwrap().verdict);

    assert_eq!(at(8).fvector.as_deref(), Some(&[6, 9, 5][..]));
    assert_eq!(at(10).fvector.as_deref(), Some(&[4, 6, 4][..]));
    assert_eq!(at(11).class, PolytopeClass::Point);
    assert_eq!(at(12).class, PolytopeClass::Empty);
    println!("criterion 2: PASS - sweep sequence cube (8,12,6) .. point .. empty, critical values {{5,7,9,11}}");
}

#[test]
fn criterion_03_equiangular_hexagon() {
    let s = ints(&[1, 1, 1, 1, 1, 1]);
    let lattice = enumerate_faces(&s).unwrap();
    assert_eq!(lattice.fvector(), &[5, 9, 6]);

    let digons = digon_vertices(&s).unwrap();
    assert_eq!(digons.len(), 3);
    for (_, face) in &digons {
        let figure = vertex_figure(&s, face).unwrap();
        assert_eq!(figure.normalized(), (1, 1));
        assert_eq!(figure.incident_facets(6), 4);
        let stored = lattice.face_by_zeros(&face.closed_zero_set).unwrap();
        assert_eq!(lattice.incident_facet_count(stored), 4);
    }

    // The dual is neighborly: every single facet is nonempty (the
    // majority-dominance bound floor((6-3)/2) = 1).
    for e in 1..=6 {
        assert!(matches!(
            face_of_zero_set(&s, &ZeroSet::new([e])).unwrap(),
            FaceOutcome::Face(_)
        ));
    }
    assert!(!cyclic::max_faced_check(&lattice, 3, 6).unwrap());
    println!("criterion 3: PASS - hexagon fvector (5,9,6), 3 octahedral digon vertices, dual neighborly but not max-faced");
}

#[test]
fn criterion_04_odd_duality_at_scale() {
    for n in [5usize, 7, 9] {
        let report = duality::verify_dual_cyclic_odd(&ints(&vec![1; n])).unwrap();
        assert!(report.verdict, "all-ones necklace of length {n}");
    }
    let mut rng = StdRng::seed_from_u64(0x5eed_0004);
    for n in [5usize, 7, 9] {
        for trial in 0..50 {
            let s = random_majority_dominant(&mut rng, n);
            let report = duality::verify_dual_cyclic_odd(&s).unwrap();
            assert!(report.verdict, "n = {n}, trial {trial}, necklace {s}");
            assert!(report.witness.is_some());
        }
    }
    println!("criterion 4: PASS - explicit -2 duality for all-ones and 50 random majority-dominant necklaces per n in {{5,7,9}}");
}

#[test]
fn criterion_05_even_duality_and_witness_counts() {
    for n in [6usize, 8] {
        let mut entries = vec![1i64; n];
        entries[n - 1] = 2;
        let s = ints(&entries);
        let report = duality::verify_dual_cyclic_even(&s).unwrap();
        assert!(report.verdict, "necklace {s}");

        let lattice = enumerate_faces(&s).unwrap();
        let cyclic_lattice = cyclic::face_lattice(n - 3, n).unwrap();
        let witnesses = duality::anti_isomorphism_witnesses(&lattice, &cyclic_lattice).unwrap();
        assert_eq!(witnesses.len(), 4, "witness count at n = {n}");
    }
    assert!(duality::verify_dual_cyclic_even(&ints(&[1, 2, 1, 4, 3, 4])).unwrap().verdict);
    println!("criterion 5: PASS - even-n duality for [1,..,1,2] (n=6,8) and [1,2,1,4,3,4]; 4 witnesses each");
}

#[test]
fn criterion_06_tours_match_trigon_vertices() {
    for n in (3usize..=21).step_by(2) {
        let small = tours::enumerate_small(n).unwrap();
        let odd = tours::enumerate_odd(n).unwrap();
        assert_eq!(small.len() as u64, tours::tour_count(n));
        assert_eq!(odd.len() as u64, tours::tour_count(n));
        let image: std::collections::BTreeSet<tours::Tour> =
            small.iter().map(tours::Tour::map_neg2).collect();
        assert_eq!(image.len(), small.len());
        assert_eq!(image, odd.iter().copied().collect());
    }
    // Small-tour normal forms are exactly the trigon gap triples of the
    // all-ones necklace, and the facet count of C_{n-3}(n) matches.
    for n in [5usize, 7, 9, 11] {
        let triples: Vec<(usize, usize, usize)> =
            tours::enumerate_small(n).unwrap().iter().map(|t| t.normal).collect();
        let trigons = trigon_vertices(&ints(&vec![1; n])).unwrap();
        assert_eq!(triples, trigons, "n = {n}");
        let facets = cyclic::gale_facets(n - 3, n).unwrap();
        assert_eq!(facets.len() as u64, tours::tour_count(n), "facet count of C_{}({n})", n - 3);
    }
    println!("criterion 6: PASS - tour counts C(n+1,3)/4 and -2 bijection for odd n <= 21; small tours = trigon triples for n in {{5,7,9,11}}");
}

#[test]
fn criterion_07_oracle_equivalence() {
    let primes = [2i64, 3, 5, 7, 11, 13, 17, 19, 23, 29];
    for d in 1..=6usize {
        for m in (d + 1)..=10usize {
            let gale = cyclic::gale_facets(d, m).unwrap();
            let oracle = cyclic::moment_oracle_facets(d, m, None).unwrap();
            assert_eq!(gale, oracle, "default parameters at C_{d}({m})");
            let alt = cyclic::moment_oracle_facets(d, m, Some(&primes[..m])).unwrap();
            assert_eq!(gale, alt, "prime parameters at C_{d}({m})");
        }
    }
    assert_eq!(cyclic::gale_facets(4, 7).unwrap().len(), 14);
    println!("criterion 7: PASS - Gale facets equal exact moment-curve facets for d <= 6, m <= 10, two parameter vectors; |C_4(7)| = 14");
}

#[test]
fn criterion_08_vertex_figures_of_cyclic_polytopes() {
    for m in 3..=9usize {
        for d in 2..m {
            let reference = cyclic::face_lattice(d - 1, m - 1).unwrap();
            let figure = cyclic::vertex_figure_lattice(d, m, m).unwrap();
            assert!(
                cyclic::simplicial_isomorphism(&figure, &reference).is_some(),
                "last vertex of C_{d}({m})"
            );
            if d % 2 == 0 {
                for v in 1..m {
                    let figure = cyclic::vertex_figure_lattice(d, m, v).unwrap();
                    assert!(
                        cyclic::simplicial_isomorphism(&figure, &reference).is_some(),
                        "vertex {v} of C_{d}({m})"
                    );
                }
            }
        }
    }
    println!("criterion 8: PASS - vertex figures of C_d(m) are C_(d-1)(m-1) for 2 <= d < m <= 9 (all vertices for even d)");
}

#[test]
fn criterion_09_neighborliness_of_random_duals() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0009);
    for n in 6usize..=12 {
        let k = (n - 3) / 2;
        for trial in 0..25 {
            let s = random_majority_dominant(&mut rng, n);
            let mut subset: Vec<usize> = (1..=k).collect();
            loop {
                let z = ZeroSet::new(subset.iter().copied());
                assert!(
                    matches!(face_of_zero_set(&s, &z).unwrap(), FaceOutcome::Face(_)),
                    "facets {subset:?} of {s} fail to meet (n = {n}, trial {trial})"
                );
                if !next_subset(&mut subset, k, n) {
                    break;
                }
            }
            // With no ties at all, the polytope is simple and its dual
            // simplicial.
            if s.substring_ties().is_empty() {
                assert!(fixed_angles::is_simple(&s).unwrap());
            }
        }
    }
    println!("criterion 9: PASS - every floor((n-3)/2)-subset of facets meets, 25 random majority-dominant necklaces per n in 6..=12");
}

fn next_subset(subset: &mut [usize], k: usize, n: usize) -> bool {
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < n - (k - 1 - i) {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[test]
fn criterion_10_area_form_signature() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0010);
    for trial in 0..100 {
        let n = 4 + trial % 9;
        let s = random_full_dim(&mut rng, n);
        let signature = geometry::area_form_signature(&s).unwrap();
        assert_eq!(signature, (1, n - 3), "necklace {s} (trial {trial})");
    }
    println!("criterion 10: PASS - area form signature (1, n-3) on 100 random full-dimensional necklaces, n in 4..=12");
}

#[test]
fn criterion_11_km_map_properties() {
    let s = ints(&[1, 1, 1, 1, 1]);
    let image = scmap::km_map_detailed(&s, &scmap::FixedLengthsShape::regular(5)).unwrap();
    for &l in &image.lengths {
        assert!((l - 0.2).abs() <= 1e-8);
    }
    assert!(image.closure_residual <= 1e-8);
    assert!(image.max_rel_change <= 1e-8, "self-convergence {}", image.max_rel_change);
    assert!((image.lengths.iter().sum::<f64>() - 1.0).abs() <= 1e-12);

    // The same properties away from the symmetric point.
    for (entries, k, rho) in
        [(vec![1i64, 1, 1, 1, 1], 2usize, 0.9f64), (vec![1, 3, 2, 4, 5], 2, 0.5)]
    {
        let s = ints(&entries);
        let shape = scmap::shape_with_pinched_turn(&s, k, rho).unwrap();
        let image = scmap::km_map_detailed(&s, &shape).unwrap();
        assert!(image.lengths.iter().all(|&l| l >= 0.0));
        assert!(image.closure_residual <= 1e-8);
        assert!(image.max_rel_change <= 1e-8);
        assert!((image.lengths.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }
    println!("criterion 11: PASS - regular pentagon maps to (1/5,..,1/5); closure <= 1e-8, unit perimeter, node-doubling agreement <= 1e-8");
}

#[test]
fn criterion_12_boundary_exponent_law() {
    let grid = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4];

    let s = ints(&[1, 1, 1, 1, 1]);
    let report = scmap::boundary_exponent_probe(&s, 1, &grid).unwrap();
    assert!((report.q_analytic - 0.2).abs() < 1e-12);
    let rel = (report.q_hat - report.q_analytic).abs() / report.q_analytic;
    assert!(rel <= 0.02, "pentagon q_hat {} vs {}", report.q_hat, report.q_analytic);
    assert!(report.q_hat < 1.0);

    let s = ints(&[1, 3, 2, 4, 5]);
    let report = scmap::boundary_exponent_probe(&s, 1, &grid).unwrap();
    assert!((report.q_analytic - 7.0 / 15.0).abs() < 1e-12);
    let rel = (report.q_hat - report.q_analytic).abs() / report.q_analytic;
    assert!(rel <= 0.02, "(1,3) pair q_hat {} vs {}", report.q_hat, report.q_analytic);
    assert!(report.q_hat < 1.0);

    println!("criterion 12: PASS - fitted exponents match 1 - 2(s_k+s_k+1)/S within 2% on rho in [1e-4, 1e-2]");
}

#[test]
fn criterion_02_addendum_classification_endpoints() {
    // The two degenerate endpoints of the sweep, checked directly.
    assert_eq!(classify_polytope(&ints(&[1, 3, 1, 4, 2, 11])), PolytopeClass::Point);
    assert_eq!(classify_polytope(&ints(&[1, 3, 1, 4, 2, 12])), PolytopeClass::Empty);
    let ties = ints(&[1, 3, 1, 4, 2, 11]).substring_ties();
    assert_eq!(ties.len(), 1);
    assert_eq!(ties[0].width, 1);
}
