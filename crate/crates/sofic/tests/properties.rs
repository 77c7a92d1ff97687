//! Randomized invariants of the permutation calculus, word reduction,
//! graph good sets, and the exact linear algebra.

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sofic::approx::{self, compute_good_set};
use sofic::exactla::{charpoly, det_bareiss, inertia, rank, SparseIntMatrix};
use sofic::groups::{Letter, MarkedGroup};
use sofic::permcalc::{
    composition_bound_margin, conjugator, cycle_stats, disjoint_union_power, fix_count,
    product_power, realize_stats, Perm,
};
use sofic::{rat, Error};

fn seeded_perm(d: usize, seed: u64) -> Perm {
    Perm::random(d, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn perm_strategy(max_degree: usize) -> impl Strategy<Value = Perm> {
    (1..=max_degree, any::<u64>()).prop_map(|(d, seed)| seeded_perm(d, seed))
}

fn perm_pair_strategy(max_degree: usize) -> impl Strategy<Value = (Perm, Perm)> {
    (1..=max_degree, any::<u64>(), any::<u64>())
        .prop_map(|(d, s1, s2)| (seeded_perm(d, s1), seeded_perm(d, s2)))
}

fn dense_matrix_strategy(max_dim: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_dim).prop_flat_map(|n| {
        proptest::collection::vec(proptest::collection::vec(-5i64..=5, n), n)
    })
}

fn sparse_from_dense(rows: &[Vec<i64>]) -> SparseIntMatrix {
    let n = rows.len();
    let mut triplets = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v != 0 {
                triplets.push((i, j, BigInt::from(v)));
            }
        }
    }
    SparseIntMatrix::from_triplets(n, n, triplets).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn product_power_fixes_exponentiate((p, k) in (perm_strategy(12), 1usize..=3)) {
        let amplified = product_power(&p, k).unwrap();
        prop_assert_eq!(amplified.degree(), p.degree().pow(k as u32));
        prop_assert_eq!(
            fix_count(&amplified) as u128,
            (fix_count(&p) as u128).pow(k as u32)
        );
    }

    #[test]
    fn disjoint_union_power_fixes_scale((p, k) in (perm_strategy(40), 1usize..=4)) {
        let stacked = disjoint_union_power(&p, k).unwrap();
        prop_assert_eq!(stacked.degree(), k * p.degree());
        prop_assert_eq!(fix_count(&stacked), k * fix_count(&p));
    }

    #[test]
    fn composition_margin_nonnegative(((a, b), t) in (perm_pair_strategy(10), 1usize..=10)) {
        let t = t.min(a.degree());
        let margin = composition_bound_margin(&a, &b, t).unwrap();
        prop_assert!(margin >= 0, "margin {margin}");
    }

    #[test]
    fn conjugator_exact_iff_same_type((a, b) in perm_pair_strategy(24)) {
        let same_type = cycle_stats(&a).cycle_type() == cycle_stats(&b).cycle_type();
        match conjugator(&a, &b) {
            Ok(c) => {
                prop_assert!(same_type);
                prop_assert_eq!(c.compose(&a).compose(&c.inverse()), b);
            }
            Err(Error::CycleTypeMismatch(_)) => prop_assert!(!same_type),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn realize_reproduces_census(p in perm_strategy(200)) {
        let census = cycle_stats(&p);
        let realized = realize_stats(&census.normalized(), p.degree()).unwrap();
        prop_assert_eq!(cycle_stats(&realized).counts, census.counts);
    }

    #[test]
    fn free_words_cancel(
        (rank, word) in (1usize..=3).prop_flat_map(|rank| {
            (
                Just(rank),
                proptest::collection::vec(0..(2 * rank) as Letter, 0..12),
            )
        })
    ) {
        let group = MarkedGroup::free(rank).unwrap();
        let m = 2 * rank;
        let mut inverse_word: Vec<Letter> = word
            .iter()
            .rev()
            .map(|&l| ((l as usize + m / 2) % m) as Letter)
            .collect();
        let mut both = word.clone();
        both.append(&mut inverse_word);
        prop_assert_eq!(group.word_reduce(&both).unwrap(), group.identity());

        // canonical words are stable under re-reduction
        let e = group.word_reduce(&word).unwrap();
        let canonical = group.word_for(&e).unwrap();
        prop_assert_eq!(group.word_reduce(&canonical).unwrap(), e);
    }

    #[test]
    fn torus_good_sets_antitone((d, n) in (1usize..=2, 3usize..=8)) {
        let group = MarkedGroup::lattice(d).unwrap();
        let g = approx::torus_graph(d, n).unwrap();
        let mut previous: Option<Vec<usize>> = None;
        for r in 0..=3 {
            let good = compute_good_set(&g, &group, r);
            if let Some(prev) = &previous {
                for v in &good {
                    prop_assert!(prev.binary_search(v).is_ok(), "good sets must shrink");
                }
            }
            previous = Some(good);
        }
    }

    #[test]
    fn random_graph_good_sets_antitone((n, seed) in (4usize..=40, any::<u64>())) {
        let group = MarkedGroup::free(2).unwrap();
        let g = approx::random_free_graph(2, n, seed).unwrap();
        let mut previous: Option<Vec<usize>> = None;
        for r in 0..=2 {
            let good = compute_good_set(&g, &group, r);
            if let Some(prev) = &previous {
                for v in &good {
                    prop_assert!(prev.binary_search(v).is_ok(), "good sets must shrink");
                }
            }
            previous = Some(good);
        }
    }

    #[test]
    fn charpoly_constant_term_is_det(rows in dense_matrix_strategy(6)) {
        let m = sparse_from_dense(&rows);
        let n = rows.len();
        let coeffs = charpoly(&m).unwrap();
        prop_assert_eq!(coeffs.len(), n + 1);
        prop_assert_eq!(&coeffs[n], &BigInt::from(1));
        let det = det_bareiss(&m).unwrap();
        let sign = if n % 2 == 0 { 1 } else { -1 };
        prop_assert_eq!(&coeffs[0], &(det * sign));
    }

    #[test]
    fn symmetric_inertia_sums_to_dim((rows, num, den) in (dense_matrix_strategy(6), -6i64..=6, 1i64..=4)) {
        let n = rows.len();
        let mut sym = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                sym[i][j] = rows[i][j] + rows[j][i];
            }
        }
        let m = sparse_from_dense(&sym);
        let lambda = rat(num, den);
        let (below, at, above) = inertia(&m, &lambda).unwrap();
        prop_assert_eq!(below + at + above, n);

        // For symmetric matrices the zero-eigenvalue count from the inertia
        // at 0 agrees with the exact rank defect.
        let (_, at_zero, _) = inertia(&m, &rat(0, 1)).unwrap();
        prop_assert_eq!(rank(&m), n - at_zero);
    }
}
