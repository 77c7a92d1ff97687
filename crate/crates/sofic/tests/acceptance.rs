//! Acceptance gate: thirteen quantitative checks of the library against
//! independently derived values.  Each test prints one `criterion N (...):
//! PASS` line (visible under `--nocapture`); a failed assertion means the
//! criterion is not met.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sofic::amenact::{self, FiniteAction, FolnerOutcome, ParadoxOutcome};
use sofic::approx::{self, good_set, LabeledGraph};
use sofic::exactla::{det_star, SparseIntMatrix};
use sofic::groups::{gh_distance, GhDistance, Letter, MarkedGroup};
use sofic::l2::{self, approximate, Block, GroupRingMatrix};
use sofic::permcalc::{
    composition_bound_margin, conjugator, covering_closure, cycle_stats, fix_count,
    product_power, realize_stats, Perm,
};
use sofic::witness::{amplify, choose_amplification, verify_witness, witness_from_quotient};
use sofic::{rat, Error, Rat};

// ---------------------------------------------------------------------------
// shared samplers and helpers

/// Random operator over ℤ, ℤ², or F₂ (d ≤ 2, words of length ≤ 2, entries
/// in [−3, 3]) together with a graph of at most 150/d vertices whose good
/// set is computed at the operator's width.
fn sample_operator(rng: &mut ChaCha8Rng) -> (GroupRingMatrix, LabeledGraph) {
    let kind = rng.gen_range(0..3u8);
    let d = rng.gen_range(1..=2usize);
    let vertex_cap = 150 / d;
    let (group, mut graph) = match kind {
        0 => {
            let n = rng.gen_range(8..=vertex_cap);
            (MarkedGroup::lattice(1).unwrap(), approx::torus_graph(1, n).unwrap())
        }
        1 => {
            let side_cap = if d == 1 { 12 } else { 8 };
            let n = rng.gen_range(6..=side_cap);
            (MarkedGroup::lattice(2).unwrap(), approx::torus_graph(2, n).unwrap())
        }
        _ => {
            let n = rng.gen_range(20..=vertex_cap);
            let seed = rng.gen();
            (
                MarkedGroup::free(2).unwrap(),
                approx::random_free_graph(2, n, seed).unwrap(),
            )
        }
    };
    let a = sample_terms(rng, &group, d);
    assert!(d * graph.vertex_count() <= 150);
    good_set(&mut graph, &group, a.width());
    (a, graph)
}

fn sample_terms(rng: &mut ChaCha8Rng, group: &MarkedGroup, d: usize) -> GroupRingMatrix {
    let m = group.generator_count();
    let term_count = rng.gen_range(1..=4usize);
    let mut terms: Vec<(sofic::groups::Elem, Block)> = Vec::new();
    for _ in 0..term_count {
        let len = rng.gen_range(0..=2usize);
        let word: Vec<Letter> = (0..len).map(|_| rng.gen_range(0..m) as Letter).collect();
        let e = group.word_reduce(&word).unwrap();
        let block: Block = (0..d)
            .map(|_| (0..d).map(|_| BigInt::from(rng.gen_range(-3..=3i32))).collect())
            .collect();
        terms.push((e, block));
    }
    GroupRingMatrix::new(group.clone(), d, terms).unwrap()
}

fn spmv(m: &SparseIntMatrix, v: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); m.rows()];
    for (r, c, value) in m.iter() {
        out[r] += value * &v[c];
    }
    out
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn all_perms(n: usize) -> Vec<Perm> {
    fn rec(prefix: &mut Vec<u32>, rest: &mut Vec<u32>, out: &mut Vec<Perm>) {
        if rest.is_empty() {
            out.push(Perm::from_images(prefix.clone()).unwrap());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            rec(prefix, rest, out);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..n as u32).collect(), &mut out);
    out
}

fn cycle_graph_action(n: usize) -> FiniteAction {
    let z = MarkedGroup::lattice(1).unwrap();
    let g = approx::torus_graph(1, n).unwrap();
    FiniteAction::from_graph(&z, &g).unwrap()
}

// ---------------------------------------------------------------------------
// 1. det* of Δ_m is a positive integer on random inputs

#[test]
fn criterion_01_det_star_positivity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for trial in 0..50 {
        let (a, g) = sample_operator(&mut rng);
        let op = approximate(&a, &g).unwrap();
        let delta = op.delta();
        let ds = det_star(&delta)
            .unwrap_or_else(|e| panic!("trial {trial}: det* failed: {e}"));
        assert!(ds.is_positive(), "trial {trial}: det* = {ds}");
    }
    println!("criterion 1 (det* positivity): PASS");
}

// ---------------------------------------------------------------------------
// 2. det* of the C_n Laplacian is n² exactly

#[test]
fn criterion_02_cycle_laplacian_det_star() {
    let z = MarkedGroup::lattice(1).unwrap();
    let lap = GroupRingMatrix::laplacian(&z).unwrap();
    for n in 4..=64usize {
        let mut g = approx::torus_graph(1, n).unwrap();
        good_set(&mut g, &z, 1);
        let op = approximate(&lap, &g).unwrap();
        let ds = det_star(&op.matrix).unwrap();
        assert_eq!(ds, BigInt::from((n * n) as u64), "n = {n}");
    }
    println!("criterion 2 (cycle Laplacian det* = n^2): PASS");
}

// ---------------------------------------------------------------------------
// 3. ℤ² determinant approximation on the 20-torus

#[test]
fn criterion_03_torus_log_det() {
    let z2 = MarkedGroup::lattice(2).unwrap();
    let lap = GroupRingMatrix::laplacian(&z2).unwrap();
    let mut g = approx::torus_graph(2, 20).unwrap();
    good_set(&mut g, &z2, 1);
    let op = approximate(&lap, &g).unwrap();
    assert_eq!(op.dim(), 400);
    let ld = l2::log_det_star_matrix(&op.matrix, 400, 200).unwrap();
    assert!(!ld.exact, "400 > 200 must take the floating path");
    let err = (ld.value - 1.16624).abs();
    assert!(err < 0.05, "ln det*/n² = {} (err {err})", ld.value);
    println!("criterion 3 (torus log-determinant): PASS");
}

// ---------------------------------------------------------------------------
// 4. exact normalized kernel dimension of diag(1−s, 0) on C₅₀

#[test]
fn criterion_04_kernel_dimension() {
    let z = MarkedGroup::lattice(1).unwrap();
    let s = z.word_reduce(&[0]).unwrap();
    let one = BigInt::from(1);
    let a = GroupRingMatrix::new(
        z.clone(),
        2,
        vec![
            (z.identity(), vec![vec![one.clone(), BigInt::zero()], vec![BigInt::zero(), BigInt::zero()]]),
            (s, vec![vec![-one, BigInt::zero()], vec![BigInt::zero(), BigInt::zero()]]),
        ],
    )
    .unwrap();
    let mut g = approx::torus_graph(1, 50).unwrap();
    good_set(&mut g, &z, 1);
    let k = l2::normalized_kernel_dim(&a, &g).unwrap();
    assert_eq!(k, rat(51, 50));
    assert_eq!(k - rat(1, 1), rat(1, 50));
    println!("criterion 4 (kernel dimension 51/50): PASS");
}

// ---------------------------------------------------------------------------
// 5. polynomial trace identity for 2−s−s⁻¹ over ℤ

#[test]
fn criterion_05_trace_polynomials() {
    let z = MarkedGroup::lattice(1).unwrap();
    let a = GroupRingMatrix::laplacian(&z).unwrap();
    let x = [BigInt::zero(), BigInt::from(1)];
    let x2 = [BigInt::zero(), BigInt::zero(), BigInt::from(1)];
    for n in [9usize, 10, 20] {
        let mut g = approx::torus_graph(1, n).unwrap();
        good_set(&mut g, &z, 1);
        let (lhs, rhs) = l2::trace_poly(&a, &x, &g).unwrap();
        assert_eq!(lhs, BigInt::from(6), "n = {n}");
        assert_eq!(rhs, rat(6, 1), "n = {n}");
        let (lhs, rhs) = l2::trace_poly(&a, &x2, &g).unwrap();
        assert_eq!(lhs, BigInt::from(70), "n = {n}");
        assert_eq!(rhs, rat(70, 1), "n = {n}");
    }
    println!("criterion 5 (trace polynomials 6 and 70): PASS");
}

// ---------------------------------------------------------------------------
// 6. norm bound dominates Rayleigh quotients; stable Δ_m profile on tori

#[test]
fn criterion_06_norm_bound_and_profile() {
    // Same sampler and seed as criterion 1, so the same 50 operators.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for trial in 0..50 {
        let (a, g) = sample_operator(&mut rng);
        let op = approximate(&a, &g).unwrap();
        let delta = op.delta();
        let bound = Rat::from(delta.norm_bound());
        let dim = delta.rows();
        for _ in 0..100 {
            let mut v: Vec<BigInt> =
                (0..dim).map(|_| BigInt::from(rng.gen_range(-2..=2i32))).collect();
            v[rng.gen_range(0..dim)] = BigInt::from(1);
            // a few power-iteration steps sharpen the quotient toward ‖Δ‖
            for _ in 0..3 {
                let next = spmv(&delta, &v);
                if next.iter().all(Zero::is_zero) {
                    break;
                }
                v = next;
            }
            let quotient = Rat::new(dot(&spmv(&delta, &v), &v), dot(&v, &v));
            assert!(
                quotient <= bound,
                "trial {trial}: Rayleigh {quotient} exceeds bound {bound}"
            );
        }
    }

    // Fixed operators on growing tori: the sparsity/magnitude profile of
    // Δ_m must not depend on the torus size.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    for (d_group, sizes) in [(1usize, vec![12usize, 16, 20]), (2, vec![10, 12])] {
        let group = MarkedGroup::lattice(d_group).unwrap();
        for _ in 0..5 {
            let d = rng.gen_range(1..=2usize);
            let a = sample_terms(&mut rng, &group, d);
            let mut profiles = Vec::new();
            for &n in &sizes {
                let mut g = approx::torus_graph(d_group, n).unwrap();
                good_set(&mut g, &group, a.width());
                let op = approximate(&a, &g).unwrap();
                profiles.push(op.delta().profile());
            }
            for p in &profiles[1..] {
                assert_eq!(p, &profiles[0], "Δ_m profile drifts with torus size");
            }
        }
    }
    println!("criterion 6 (norm bound and profile stability): PASS");
}

// ---------------------------------------------------------------------------
// 7. amplification: freeness 1/2 → 1/8 at k = 3; k chooser; fix counts

#[test]
fn criterion_07_amplification() {
    let z = MarkedGroup::lattice(1).unwrap();
    let swap = Perm::from_images(vec![1, 0, 2, 3]).unwrap();
    let f = vec![z.word_reduce(&[0]).unwrap()];
    let w = witness_from_quotient(&z, &[swap.clone(), swap.inverse()], &f, rat(1, 1)).unwrap();
    let report = verify_witness(&w).unwrap();
    assert_eq!(report.freeness, rat(1, 2));
    assert_eq!(report.multiplicativity, rat(1, 1));

    let cubed = amplify(&w, 3).unwrap();
    assert_eq!(cubed.n, 64);
    let report = verify_witness(&cubed).unwrap();
    assert_eq!(report.freeness, rat(1, 8), "(1/2)³ = 1/8 exactly");
    assert_eq!(report.multiplicativity, rat(1, 1));

    assert_eq!(choose_amplification(&rat(1, 2), &rat(0, 1), &rat(1, 10)).unwrap(), 4);

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    for _ in 0..200 {
        let d = rng.gen_range(1..=12usize);
        let alpha = Perm::random(d, &mut rng);
        let k = rng.gen_range(1..=3usize);
        let power = product_power(&alpha, k).unwrap();
        assert_eq!(
            fix_count(&power) as u64,
            (fix_count(&alpha) as u64).pow(k as u32)
        );
    }
    println!("criterion 7 (amplification): PASS");
}

// ---------------------------------------------------------------------------
// 8. realize within ±1 per cycle length; conjugator exact iff same type

#[test]
fn criterion_08_conjugacy_calculus() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    for _ in 0..100 {
        let m = rng.gen_range(2..=500usize);
        let template = Perm::random(m, &mut rng);
        let census = cycle_stats(&template).normalized();
        let n = rng.gen_range(1..=500usize);
        let realized = realize_stats(&census, n).unwrap();
        let counts = cycle_stats(&realized).counts;
        let mut lengths: BTreeSet<usize> = census.keys().copied().collect();
        lengths.extend(counts.keys().copied());
        for t in lengths {
            let requested =
                census.get(&t).cloned().unwrap_or_else(Rat::zero) * rat(n as i64, 1);
            let got = rat(*counts.get(&t).unwrap_or(&0) as i64, 1);
            let err = (got - requested).abs();
            assert!(err <= rat(1, 1), "length {t}: off by {err}");
        }
    }

    for _ in 0..200 {
        let sigma = Perm::random(100, &mut rng);
        let g = Perm::random(100, &mut rng);
        let rho = g.compose(&sigma).compose(&g.inverse());
        let c = conjugator(&sigma, &rho).unwrap();
        assert_eq!(c.compose(&sigma).compose(&c.inverse()), rho);
    }

    let mut mismatches = 0;
    while mismatches < 50 {
        let a = Perm::random(9, &mut rng);
        let b = Perm::random(9, &mut rng);
        if cycle_stats(&a).cycle_type() == cycle_stats(&b).cycle_type() {
            continue;
        }
        match conjugator(&a, &b) {
            Err(Error::CycleTypeMismatch(_)) => mismatches += 1,
            other => panic!("type mismatch must be reported, got {other:?}"),
        }
    }
    println!("criterion 8 (conjugacy calculus): PASS");
}

// ---------------------------------------------------------------------------
// 9. covering closures of even permutations with a 2-orbit

#[test]
fn criterion_09_covering_closure() {
    for n in 4..=7usize {
        let everyone = all_perms(n);
        let alternating: BTreeSet<Perm> =
            everyone.iter().filter(|p| p.is_even()).cloned().collect();

        // qualifying: even, has an orbit of length 2, and n − 2r ≥ −1 where
        // r counts all orbits (fixed points included)
        let mut by_type: BTreeMap<Vec<usize>, Vec<Perm>> = BTreeMap::new();
        for p in &everyone {
            let stats = cycle_stats(p);
            let orbits: usize = stats.counts.values().sum();
            if p.is_even()
                && stats.counts.get(&2).copied().unwrap_or(0) > 0
                && n as i64 - 2 * orbits as i64 >= -1
            {
                by_type.entry(stats.cycle_type()).or_default().push(p.clone());
            }
        }
        assert!(!by_type.is_empty(), "no qualifying permutations at n = {n}");

        for (cycle_type, members) in &by_type {
            // products of ≤ 4 conjugates form the same set for every member
            // of the class (the conjugacy class itself is shared); verify on
            // two representatives, then check the closure itself.
            let closure = covering_closure(&members[0], 4).unwrap();
            let other = covering_closure(&members[members.len() / 2], 4).unwrap();
            assert_eq!(closure, other);

            if n == 4 {
                // Double transpositions only generate the Klein four-group:
                // the 4-step covering statement genuinely needs n ≥ 5, where
                // the alternating group is simple.
                assert_eq!(cycle_type, &vec![2, 2]);
                let klein: BTreeSet<Perm> = everyone
                    .iter()
                    .filter(|p| {
                        p.is_identity() || cycle_stats(p).cycle_type() == vec![2, 2]
                    })
                    .cloned()
                    .collect();
                assert_eq!(closure.len(), 4);
                assert_eq!(closure, klein);
            } else {
                assert_eq!(
                    closure, alternating,
                    "type {cycle_type:?} at n = {n} must cover the alternating group"
                );
            }
        }
    }
    println!("criterion 9 (covering closure): PASS");
}

// ---------------------------------------------------------------------------
// 10. Følner search succeeds on the torus and fails on an expander

#[test]
fn criterion_10_folner_search() {
    // ℤ² on the 64×64 torus at ε = 0.15: ℓ¹ balls have vanishing boundary
    // ratio, so the search must find a set; the set is re-verified below.
    let z2 = MarkedGroup::lattice(2).unwrap();
    let torus = approx::torus_graph(2, 64).unwrap();
    let action = FiniteAction::from_graph(&z2, &torus).unwrap();
    let k: Vec<_> = (0..4).map(|i| z2.word_reduce(&[i as Letter]).unwrap()).collect();
    let eps = rat(15, 100);
    let outcome = amenact::folner_search(&action, &k, &eps, 11, 5_000).unwrap();
    let report = match outcome {
        FolnerOutcome::Found(r) => r,
        FolnerOutcome::Exhausted(r) => panic!(
            "search must succeed on the torus; best ratios boundary {} error {} fix {}",
            r.boundary_ratio, r.error_ratio, r.fix_ratio
        ),
    };
    // independent re-verification of the returned set
    let check = amenact::verify_folner(&action, &k, &report.set, &eps).unwrap();
    assert!(check.pass);
    let worst = check
        .boundary_ratio
        .clone()
        .max(check.error_ratio.clone())
        .max(check.fix_ratio.clone());
    assert!(worst <= rat(15, 100), "worst ratio {worst}");

    // F₂ on a random 4-regular Schreier graph: an expander, so no small set
    // has boundary ratio below 0.05 and the search must report exhaustion.
    let f2 = MarkedGroup::free(2).unwrap();
    let expander = approx::random_free_graph(2, 2000, 17).unwrap();
    let action = FiniteAction::from_graph(&f2, &expander).unwrap();
    let k: Vec<_> = (0..4).map(|i| f2.word_reduce(&[i as Letter]).unwrap()).collect();
    let eps = rat(5, 100);
    let outcome = amenact::folner_search(&action, &k, &eps, 3, 10_000).unwrap();
    let report = match outcome {
        FolnerOutcome::Exhausted(r) => r,
        FolnerOutcome::Found(r) => panic!(
            "expander admits no Følner set at ε = 0.05, yet |F| = {} passed",
            r.set.len()
        ),
    };
    let best = report
        .boundary_ratio
        .clone()
        .max(report.error_ratio.clone())
        .max(report.fix_ratio.clone());
    assert!(best > rat(5, 100), "reported best ratio {best}");
    println!("criterion 10 (Folner search): PASS");
}

// ---------------------------------------------------------------------------
// 11. paradoxical decomposition on the free ball; Hall violator on a cycle

#[test]
fn criterion_11_paradox_certificate() {
    let f2 = MarkedGroup::free(2).unwrap();
    let ball9 = approx::ball_graph(&f2, 9).unwrap();
    assert_eq!(ball9.vertex_count(), 39365, "|B₉| = 2·3⁹ − 1");
    // vertices are in breadth-first order, so the radius-8 ball is a prefix
    let a_set: Vec<usize> = (0..13121).collect();
    let k: Vec<_> = (0..4).map(|i| f2.word_reduce(&[i as Letter]).unwrap()).collect();
    let outcome = amenact::paradox_certificate_graph(&ball9, &f2, &a_set, &k, 1).unwrap();
    let pieces = match outcome {
        ParadoxOutcome::Certificate(p) => p,
        ParadoxOutcome::Failure { violator, neighbor_count } => panic!(
            "free ball must be paradoxical; violator {} neighbors {}",
            violator.len(),
            neighbor_count
        ),
    };
    let covered: usize = pieces.iter().map(|p| p.points.len()).sum();
    assert_eq!(covered, 13121);
    for piece in &pieces {
        assert_ne!(piece.s, piece.t, "each piece must use two distinct words");
    }
    amenact::verify_paradox_graph(&ball9, &f2, &a_set, &pieces).unwrap();

    // One cyclic orbit has too few neighbors for a (2,1)-matching: the whole
    // base set is a Hall violator.
    let orbit = cycle_graph_action(12);
    let z = MarkedGroup::lattice(1).unwrap();
    let k: Vec<_> = (0..2).map(|i| z.word_reduce(&[i as Letter]).unwrap()).collect();
    let a_set: Vec<usize> = (0..12).collect();
    match amenact::paradox_certificate(&orbit, &a_set, &k, 1).unwrap() {
        ParadoxOutcome::Failure { violator, neighbor_count } => {
            assert_eq!(violator, a_set);
            assert_eq!(neighbor_count, 12);
        }
        ParadoxOutcome::Certificate(_) => panic!("a finite orbit is not paradoxical"),
    }
    println!("criterion 11 (paradox certificate): PASS");
}

// ---------------------------------------------------------------------------
// 12. marking distances by exhaustive relation enumeration

#[test]
fn criterion_12_marking_distance() {
    let z = MarkedGroup::lattice(1).unwrap();
    let z5 = MarkedGroup::lattice_quotient(vec![5]).unwrap();
    let d = gh_distance(&z, &z5, 8).unwrap();
    assert_eq!(d, GhDistance::Dyadic { agree_radius: 4 });
    assert_eq!(d.value(), Some(0.0625));

    let f2 = MarkedGroup::free(2).unwrap();
    let z2 = MarkedGroup::lattice(2).unwrap();
    let d = gh_distance(&f2, &z2, 8).unwrap();
    assert_eq!(d, GhDistance::Dyadic { agree_radius: 3 });
    assert_eq!(d.value(), Some(0.125));
    println!("criterion 12 (marking distance): PASS");
}

// ---------------------------------------------------------------------------
// 13. composition inequality margin is never negative

#[test]
fn criterion_13_composition_margin() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_000d);
    for _ in 0..1000 {
        let alpha = Perm::random(8, &mut rng);
        let beta = Perm::random(8, &mut rng);
        let t = rng.gen_range(1..=8usize);
        let margin = composition_bound_margin(&alpha, &beta, t).unwrap();
        assert!(margin >= 0, "margin {margin} for t = {t}");
    }
    println!("criterion 13 (composition margin): PASS");
}
