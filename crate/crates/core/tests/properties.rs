use annulus_ops::brehmer::{self, MultiIndex, SubsetMask};
use annulus_ops::io;
use annulus_ops::linops::{self, intersect};
use annulus_ops::models::{self, PlantedBlock, PlantedSpec};
use annulus_ops::{classify, decompose, family};
use annulus_ops::{Alphabet, AnnulusParams, Complex64, ComplexMatrix, TypeAssignment, TypeLabel};
use proptest::prelude::*;

fn radius() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.3), Just(0.5), Just(0.9), 0.1f64..0.95]
}

fn phases(len: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.0f64..std::f64::consts::TAU, len)
}

fn gram(t: &ComplexMatrix) -> ComplexMatrix {
    &t.adjoint() * t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_ar_unitaries_satisfy_the_boundary_identity(
        r in radius(),
        unit in (0usize..6).prop_flat_map(phases),
        inner in (0usize..6).prop_flat_map(phases),
        seed in any::<u64>(),
    ) {
        prop_assume!(!unit.is_empty() || !inner.is_empty());
        let p = AnnulusParams::new(r).unwrap();
        let u: Vec<Complex64> = unit.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        let w: Vec<Complex64> = inner.iter().map(|&t| Complex64::from_polar(r, t)).collect();
        let n = u.len() + w.len();
        let t = models::gen_ar_unitary(&u, &w, &p)
            .unwrap()
            .conjugate_by(&models::haar_unitary_seeded(n, seed));
        let id = ComplexMatrix::identity(n);
        let g = gram(&t);
        let residual = (&(&id - &g) * &(&g - &id.scale(r * r))).norm();
        prop_assert!(residual <= 1e-10);
        prop_assert!(classify::is_ar_unitary(&t, &p));
        prop_assert!(classify::is_normal(&t, p.tol_id));

        let split = decompose::split_ar_unitary(&t, &p).unwrap();
        prop_assert_eq!(split.dims(), vec![u.len(), w.len()]);
        prop_assert!(split.orthogonality_residual() <= 1e-10);
    }

    #[test]
    fn inversion_swaps_the_unitary_parts(
        r in radius(),
        n_unit in 0usize..5,
        n_inner in 0usize..5,
        seed in any::<u64>(),
    ) {
        prop_assume!(n_unit + n_inner > 0);
        let p = AnnulusParams::new(r).unwrap();
        let mut rng = models::seeded_rng(seed);
        let t = models::random_ar_unitary(n_unit, n_inner, r, &mut rng);
        let dual = t.inverse(p.tol_rank).unwrap().scale(r);
        let a = decompose::split_ar_unitary(&t, &p).unwrap();
        let b = decompose::split_ar_unitary(&dual, &p).unwrap();
        prop_assert!(a.part("u").unwrap().space.distance(&b.part("r").unwrap().space) <= 1e-8);
        prop_assert!(a.part("r").unwrap().space.distance(&b.part("u").unwrap().space) <= 1e-8);
    }

    #[test]
    fn delta_with_unit_exponents_is_the_szego_operator(
        r in radius(),
        count in 1usize..4,
        dim in 1usize..5,
        seed in any::<u64>(),
    ) {
        let mut rng = models::seeded_rng(seed);
        let ops = models::random_commuting_ar_unitaries(count, dim, r, &mut rng);
        for u in SubsetMask::all(count) {
            let ones = MultiIndex::new(vec![1; u.len()]).unwrap();
            let delta = brehmer::delta_mk(&ops, &u, &ones).unwrap();
            let s = brehmer::szego_operator(&ops, &u).unwrap();
            prop_assert!((&delta - &s).norm() <= 1e-12);
        }
    }

    #[test]
    fn single_operator_binomial_sum_matches_scalar_oracle(
        r in radius(),
        k in 1u32..=6,
        angle in 0.0f64..std::f64::consts::TAU,
        on_outer in any::<bool>(),
    ) {
        let modulus = if on_outer { 1.0 } else { r };
        let z = Complex64::from_polar(modulus, angle);
        let t = ComplexMatrix::diagonal(&[z]);
        let single = SubsetMask::new(1, vec![0]).unwrap();
        let lib = brehmer::delta_mk(&[t], &single, &MultiIndex::new(vec![k]).unwrap()).unwrap();
        let x = modulus * modulus;
        let scalar = (1.0 - x).powi(k as i32);
        let identity_rhs = (1.0 - r * r).powi(k as i32 - 1) * (1.0 - x);
        prop_assert!((lib.get(0, 0).re - scalar).abs() <= 1e-12);
        prop_assert!((lib.get(0, 0).re - identity_rhs).abs() <= 1e-12);
    }

    #[test]
    fn brehmer_positivity_holds_for_commuting_ar_unitaries(
        r in radius(),
        count in 1usize..4,
        dim in 1usize..5,
        seed in any::<u64>(),
    ) {
        let mut rng = models::seeded_rng(seed);
        let ops = models::random_commuting_ar_unitaries(count, dim, r, &mut rng);
        let report = brehmer::check_brehmer(&ops, &AnnulusParams::new(r).unwrap()).unwrap();
        prop_assert!(report.passed);
        prop_assert_eq!(report.subsets.len(), (1 << count) - 1);
    }

    #[test]
    fn matrix_files_round_trip_bit_exactly(
        dim in 1usize..5,
        raw in proptest::collection::vec((any::<f64>(), any::<f64>()), 16),
    ) {
        let entries: Vec<Complex64> = raw
            .iter()
            .take(dim * dim)
            .map(|&(a, b)| Complex64::new(if a.is_finite() { a } else { 0.0 }, if b.is_finite() { b } else { 0.0 }))
            .collect();
        let m = ComplexMatrix::from_row_major(dim, &entries).unwrap();
        let text = io::matrix_to_json(&m).unwrap();
        let back = io::parse_matrix(&text).unwrap();
        let bits = |v: Vec<Complex64>| v.iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect::<Vec<_>>();
        prop_assert_eq!(bits(back.to_row_major()), bits(m.to_row_major()));
        prop_assert_eq!(io::matrix_to_json(&back).unwrap(), text);
    }

    #[test]
    fn complement_is_orthogonal_and_spans(dim in 2usize..7, seed in any::<u64>(), keep in 1usize..6) {
        let q = models::haar_unitary_seeded(dim, seed);
        let k = keep.min(dim - 1);
        let indices: Vec<usize> = (0..k).collect();
        let s = linops::Subspace::coordinate(dim, &indices).image(&q);
        let c = linops::complement(&s);
        prop_assert_eq!(s.dim() + c.dim(), dim);
        prop_assert!(s.overlap(&c) <= 1e-12);
        prop_assert!(intersect(&s, &c, 1e-10).unwrap().is_zero());
        prop_assert!(s.sum(&c, 1e-10).unwrap().distance(&linops::Subspace::full(dim)) <= 1e-10);
    }
}

fn planted_tuple(seed: u64, n: usize, r: f64) -> models::PlantedTuple {
    let mut rng = models::seeded_rng(seed);
    let mut blocks = Vec::new();
    let assignments = TypeAssignment::all(Alphabet::Atom, n);
    let last = assignments.len() - 1;
    for (i, a) in assignments.into_iter().enumerate() {
        if !(i == last && blocks.is_empty()) && !rand::Rng::random_bool(&mut rng, 0.7) {
            continue;
        }
        let dims = vec![1; n];
        blocks.push(PlantedBlock {
            ops: models::random_atom_block(a.labels(), &dims, r, &mut rng).unwrap(),
            labels: a.labels().to_vec(),
        });
    }
    models::gen_planted(&PlantedSpec { blocks, seed }).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn canonical_family_recovers_planted_parts(
        r in prop_oneof![Just(0.3), Just(0.5), Just(0.9)],
        n in 1usize..4,
        seed in any::<u64>(),
    ) {
        let planted = planted_tuple(seed, n, r);
        let p = AnnulusParams::new(r).unwrap();
        let report = family::canonical_family(&planted.ops, &p).unwrap();
        prop_assert_eq!(report.dims(), planted.expected_dims());
        prop_assert_eq!(report.total_dim(), planted.ops[0].dim());
        prop_assert!(report.orthogonality_residual() <= 1e-8);
        prop_assert!(report.max_reduction_residual() <= 1e-8);
        for (part, expected) in report.parts.iter().zip(&planted.expected) {
            prop_assert_eq!(&part.assignment, &expected.assignment);
            prop_assert!(part.space.distance(&expected.space) <= 1e-8);
        }
    }

    #[test]
    fn family_split_commutes_with_permutation(
        r in prop_oneof![Just(0.3), Just(0.5), Just(0.9)],
        seed in any::<u64>(),
        perm in Just(vec![0usize, 1, 2]).prop_shuffle(),
    ) {
        let planted = planted_tuple(seed, 3, r);
        let p = AnnulusParams::new(r).unwrap();
        let base = family::canonical_family(&planted.ops, &p).unwrap();
        let permuted_ops: Vec<ComplexMatrix> = perm.iter().map(|&j| planted.ops[j].clone()).collect();
        let permuted = family::canonical_family(&permuted_ops, &p).unwrap();
        for part in &base.parts {
            let moved = permuted.part(&part.assignment.permuted(&perm)).unwrap();
            prop_assert_eq!(moved.dim(), part.dim());
            prop_assert!(moved.space.distance(&part.space) <= 1e-8);
        }
    }

    #[test]
    fn canonical_split_dims_match_construction(
        r in prop_oneof![Just(0.3), Just(0.5), Just(0.9)],
        a in 0usize..4,
        b in 0usize..4,
        c in 0usize..4,
        seed in any::<u64>(),
    ) {
        prop_assume!(a + b + c > 0);
        let mut rng = models::seeded_rng(seed);
        let p = AnnulusParams::new(r).unwrap();
        let mut blocks = Vec::new();
        if a > 0 {
            blocks.push(models::random_ar_unitary(a, 0, r, &mut rng));
        }
        if b > 0 {
            blocks.push(models::random_ar_unitary(0, b, r, &mut rng));
        }
        if c > 0 {
            blocks.push(models::random_cnu_candidate(c, r, &mut rng));
        }
        let q = models::haar_unitary(a + b + c, &mut rng);
        let t = ComplexMatrix::direct_sum(&blocks).conjugate_by(&q);
        let split = decompose::canonical_ar_contraction(&t, &p).unwrap();
        prop_assert_eq!(split.dims(), vec![a, b, c]);
        let levan = decompose::levan_split(&t, &p);
        if a + b > 0 {
            prop_assert_eq!(levan.unwrap_err().kind(), "NotCnu");
        } else {
            prop_assert_eq!(levan.unwrap().dim_of("iso"), 0);
        }
    }
}

#[test]
fn burdak_and_canonical_agree_on_doubly_commuting_input() {
    let planted = planted_tuple(77, 2, 0.5);
    let p = AnnulusParams::new(0.5).unwrap();
    let canon = family::canonical_family(&planted.ops, &p).unwrap();
    let burdak = family::burdak_family(&planted.ops, &p).unwrap();
    for part in &burdak.parts {
        let other = canon.part(&part.assignment).unwrap();
        assert_eq!(other.dim(), part.dim(), "{}", part.assignment);
        assert!(other.space.distance(&part.space) <= 1e-8);
    }
    assert!(burdak.parts.iter().all(|p| p.assignment.count(TypeLabel::Tc) <= 1));
}
