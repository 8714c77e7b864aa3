use erdos::assignment::{delta, frob_sq, is_erdos, max_delta_matrix, maxtr, MaxTraceMethod};
use erdos::birkhoff::{decompose, reduce_affine, reduce_linear};
use erdos::canonical::canonical_form;
use erdos::gram::{build_gram, pipeline, solve_candidate, Independence, PipelineOutcome};
use erdos::linalg::{affine_independent, linear_independent, RationalMatrix};
use erdos::perm::{conjugacy_class_reps, enumerate_sn, partitions, Permutation};
use erdos::rational::Rational;
use erdos::sample::{random_bistochastic, random_permutation};
use erdos::textfmt::parse_bistochastic;
use proptest::prelude::*;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn bound(n: usize) -> Rational {
    Rational::new(n as i64 - 1, 4)
}

/// A random set of `m` distinct permutations that contains the identity.
fn random_family(r: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<Permutation> {
    let sn = enumerate_sn(n).unwrap();
    let mut picks: Vec<usize> = sample(r, sn.len() - 1, m - 1).into_iter().map(|i| i + 1).collect();
    picks.sort_unstable();
    std::iter::once(0).chain(picks).map(|i| sn[i].clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn marcus_ree_and_upper_bound(seed: u64, n in 2usize..=5, k in 1usize..=8) {
        let a = random_bistochastic(&mut rng(seed), n, k, 12);
        let d = delta(&a);
        prop_assert!(!d.is_negative());
        prop_assert!(d <= bound(n));
    }

    #[test]
    fn delta_is_an_orbit_invariant(seed: u64, n in 2usize..=5) {
        let mut r = rng(seed);
        let a = random_bistochastic(&mut r, n, 4, 9);
        let (p, q) = (random_permutation(&mut r, n), random_permutation(&mut r, n));
        let b = a.permute(&p, &q);
        prop_assert_eq!(delta(&b), delta(&a));
        prop_assert_eq!(delta(&a.transpose()), delta(&a));
        prop_assert_eq!(canonical_form(&b).unwrap(), canonical_form(&a).unwrap());
    }

    #[test]
    fn hungarian_matches_brute(seed: u64, n in 1usize..=6, k in 1usize..=7) {
        let a = random_bistochastic(&mut rng(seed), n, k, 20);
        let brute = maxtr(&a, MaxTraceMethod::Brute).unwrap();
        let hung = maxtr(&a, MaxTraceMethod::Hungarian).unwrap();
        prop_assert_eq!(&hung.value, &brute.value);
        prop_assert!(brute.witnesses.contains(&hung.witnesses[0]));
    }

    #[test]
    fn hungarian_on_signed_matrices(seed: u64, n in 1usize..=5) {
        let mut r = rng(seed);
        let entries: Vec<Rational> = (0..n * n)
            .map(|_| Rational::new(r.gen_range(-30i64..30), r.gen_range(1i64..7)))
            .collect();
        let m = RationalMatrix::from_entries(n, n, entries);
        let best = enumerate_sn(n).unwrap().iter()
            .map(|p| (0..n).map(|i| m.get(i, p.apply(i)).clone()).sum::<Rational>())
            .max()
            .unwrap();
        prop_assert_eq!(erdos::assignment::maxtr_hungarian(&m).value, best);
    }

    #[test]
    fn decomposition_round_trip(seed: u64, n in 1usize..=5, k in 1usize..=12) {
        let a = random_bistochastic(&mut rng(seed), n, k, 15);
        let d = decompose(&a);
        prop_assert_eq!(d.reconstruct(), a.clone());
        let r = reduce_affine(&d);
        prop_assert_eq!(r.reconstruct(), a.clone());
        prop_assert!(affine_independent(&r.support()));
        prop_assert!(r.len() <= (n - 1) * (n - 1) + 1);
        prop_assert_eq!(reduce_affine(&r), r.clone());
        prop_assert!(r.weights().iter().all(Rational::is_positive));
        prop_assert_eq!(r.weights().into_iter().sum::<Rational>(), Rational::one());
    }

    #[test]
    fn text_round_trip(seed: u64, n in 1usize..=6) {
        let a = random_bistochastic(&mut rng(seed), n, 5, 30);
        prop_assert_eq!(parse_bistochastic(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn rank_is_transpose_invariant(seed: u64, rows in 1usize..=6, cols in 1usize..=6) {
        let mut r = rng(seed);
        let entries = (0..rows * cols).map(|_| Rational::from(r.gen_range(-2i64..=2))).collect();
        let m = RationalMatrix::from_entries(rows, cols, entries);
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn solve_multiplies_back(seed: u64, n in 1usize..=12) {
        let mut r = rng(seed);
        let entries = (0..n * n).map(|_| Rational::new(r.gen_range(-9i64..=9), r.gen_range(1i64..=4))).collect();
        let m = RationalMatrix::from_entries(n, n, entries);
        let rhs: Vec<Rational> = (0..n).map(|_| Rational::from(r.gen_range(-5i64..=5))).collect();
        match m.solve(&rhs) {
            Ok(x) => prop_assert_eq!(m.mul_vec(&x).unwrap(), rhs),
            Err(_) => prop_assert!(m.rank() < n),
        }
    }

    #[test]
    fn independent_families(seed: u64, n in 3usize..=4, m in 1usize..=10) {
        let mut r = rng(seed);
        let family = random_family(&mut r, n, m.min((n - 1) * (n - 1) + 1));
        let lin = linear_independent(&family);
        prop_assert_eq!(lin, affine_independent(&family));
        let g = build_gram(&family).unwrap();
        prop_assert_eq!(g.independence() == Independence::Linear, lin);
        if !lin {
            return Ok(());
        }
        // Positive definite: every leading principal minor is positive.
        let gm = g.gram_matrix();
        for k in 1..=family.len() {
            let rows: Vec<Vec<Rational>> = (0..k).map(|i| gm.row(i)[..k].to_vec()).collect();
            prop_assert!(RationalMatrix::from_rows(rows).determinant().unwrap().is_positive());
        }
        let x = solve_candidate(&g).unwrap();
        // Relabelling the family relabels the solution.
        let mut order: Vec<usize> = (0..family.len()).collect();
        order.reverse();
        let shuffled: Vec<Permutation> = order.iter().map(|&i| family[i].clone()).collect();
        let y = solve_candidate(&build_gram(&shuffled).unwrap()).unwrap();
        for (pos, &i) in order.iter().enumerate() {
            prop_assert_eq!(&y.x[pos], &x.x[i]);
        }
        if let PipelineOutcome::Accepted(acc) = pipeline(&family).unwrap() {
            for p in &family {
                prop_assert_eq!(acc.matrix.diagonal_sum(p), frob_sq(&acc.matrix));
                prop_assert!(acc.verdict.certificate.witnesses.contains(p) || x.x[family.iter().position(|q| q == p).unwrap()].is_zero());
            }
        }
    }
}

#[test]
fn max_delta_attains_bound() {
    for n in 2..=6 {
        assert_eq!(delta(&max_delta_matrix(n)), bound(n));
    }
}

#[test]
fn partitions_match_class_reps() {
    let p = [1, 2, 3, 5, 7, 11, 15, 22];
    for n in 1..=8 {
        assert_eq!(partitions(n).len(), p[n - 1]);
        assert_eq!(conjugacy_class_reps(n).unwrap().len(), p[n - 1]);
    }
}

#[test]
fn erdos_supports_are_witnesses() {
    let r = erdos::enumerate::enumerate_erdos(&erdos::enumerate::EnumerationConfig::new(3)).unwrap();
    for class in &r.classes {
        let a = erdos::linalg::BistochasticMatrix::convex_combination(class.weights.iter().zip(&class.support)).unwrap();
        let v = is_erdos(&a);
        for p in &class.support {
            assert!(v.certificate.witnesses.contains(p));
        }
        let lin = reduce_linear(&decompose(&a)).unwrap();
        assert!(linear_independent(&lin.support()));
        assert_eq!(lin.reconstruct(), a);
    }
}
