//! Cycle-statistics calculus on finite permutations.
//!
//! Everything here is exact: cycle censuses are integer counts, frequencies
//! are rationals, and the two amplification operators come with the
//! fixed-point identities `#fix(∐ᵏα) = k·#fix(α)` and `#fix(∏ᵏα) = #fix(α)ᵏ`
//! that the witness layer relies on.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Rat, Result};

/// Largest degree `disjoint_union_power` / `product_power` will produce.
pub const POWER_DEGREE_CAP: u64 = 1_000_000;

/// Default degree cap for `covering_closure`; the closure walks a chunk of Aₙ.
pub const COVER_DEGREE_DEFAULT_CAP: usize = 7;

/// Hard ceiling for `covering_closure_with_cap`.
pub const COVER_DEGREE_HARD_CAP: usize = 8;

/// A permutation of `{0, …, d−1}`, stored as its image vector.
///
/// Text and JSON forms are 1-based; all in-memory indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    pub fn identity(d: usize) -> Perm {
        assert!(d >= 1, "degree must be positive");
        Perm { images: (0..d as u32).collect() }
    }

    /// Builds from a 0-based image vector, verifying bijectivity.
    pub fn from_images(images: Vec<u32>) -> Result<Perm> {
        if images.is_empty() {
            return Err(Error::InvalidPermutation("degree 0".into()));
        }
        let d = images.len();
        let mut seen = vec![false; d];
        for &im in &images {
            let im = im as usize;
            if im >= d {
                return Err(Error::InvalidPermutation(format!(
                    "image {} out of range for degree {}",
                    im + 1,
                    d
                )));
            }
            if seen[im] {
                return Err(Error::InvalidPermutation(format!(
                    "image {} repeated",
                    im + 1
                )));
            }
            seen[im] = true;
        }
        Ok(Perm { images })
    }

    /// Builds from disjoint cycles (0-based points); unlisted points are fixed.
    pub fn from_cycles(d: usize, cycles: &[&[u32]]) -> Result<Perm> {
        let mut images: Vec<u32> = (0..d as u32).collect();
        let mut used = vec![false; d];
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                let x = x as usize;
                if x >= d {
                    return Err(Error::InvalidPermutation(format!(
                        "cycle point {} out of range for degree {}",
                        x + 1,
                        d
                    )));
                }
                if used[x] {
                    return Err(Error::InvalidPermutation(format!(
                        "point {} appears in two cycles",
                        x + 1
                    )));
                }
                used[x] = true;
                images[x] = cycle[(i + 1) % cycle.len()];
            }
        }
        Perm::from_images(images)
    }

    /// Uniformly random permutation (Fisher–Yates via `shuffle`).
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Perm {
        let mut images: Vec<u32> = (0..d as u32).collect();
        images.shuffle(rng);
        Perm { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// Function composition: `(self ∘ other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree(), "composing unequal degrees");
        Perm {
            images: other.images.iter().map(|&x| self.images[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.degree()];
        for (x, &im) in self.images.iter().enumerate() {
            inv[im as usize] = x as u32;
        }
        Perm { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &im)| x as u32 == im)
    }

    /// Canonical cycle decomposition: every cycle starts at its smallest
    /// point, fixed points included, cycles ordered by starting point.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let d = self.degree();
        let mut seen = vec![false; d];
        let mut out = Vec::new();
        for start in 0..d {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x as u32);
                x = self.apply(x);
            }
            out.push(cycle);
        }
        out
    }

    /// Sign parity: even iff degree − (number of cycles) is even.
    pub fn is_even(&self) -> bool {
        let d = self.degree();
        let mut seen = vec![false; d];
        let mut ncycles = 0usize;
        for start in 0..d {
            if seen[start] {
                continue;
            }
            ncycles += 1;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.apply(x);
            }
        }
        (d - ncycles).is_multiple_of(2)
    }
}

impl fmt::Display for Perm {
    /// Cycle notation on 1-based points; identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for cycle in self.cycles() {
            if cycle.len() < 2 {
                continue;
            }
            wrote = true;
            write!(f, "(")?;
            for (i, x) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", x + 1)?;
            }
            write!(f, ")")?;
        }
        if !wrote {
            write!(f, "()")?;
        }
        Ok(())
    }
}

impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let one_based: Vec<u64> = self.images.iter().map(|&x| x as u64 + 1).collect();
        one_based.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Perm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Perm, D::Error> {
        let one_based = Vec::<u64>::deserialize(d)?;
        let mut images = Vec::with_capacity(one_based.len());
        for v in one_based {
            if v == 0 || v > u32::MAX as u64 {
                return Err(D::Error::custom(format!("image {v} out of range")));
            }
            images.push((v - 1) as u32);
        }
        Perm::from_images(images).map_err(D::Error::custom)
    }
}

/// Exact cycle census of a permutation: `counts[t]` = number of t-cycles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleStats {
    pub degree: usize,
    pub counts: BTreeMap<usize, usize>,
}

impl CycleStats {
    pub fn fix_count(&self) -> usize {
        self.counts.get(&1).copied().unwrap_or(0)
    }

    /// Frequencies P_t = counts(t)/degree; these satisfy Σ t·P_t = 1 exactly.
    pub fn normalized(&self) -> BTreeMap<usize, Rat> {
        self.counts
            .iter()
            .map(|(&t, &c)| (t, crate::rat(c as i64, self.degree as i64)))
            .collect()
    }

    /// Cycle lengths with multiplicity, ascending — the conjugacy invariant.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut lens = Vec::new();
        for (&t, &c) in &self.counts {
            lens.extend(std::iter::repeat_n(t, c));
        }
        lens
    }
}

/// Full cycle census; Σ t·counts(t) = degree always.
pub fn cycle_stats(p: &Perm) -> CycleStats {
    let mut counts = BTreeMap::new();
    for cycle in p.cycles() {
        *counts.entry(cycle.len()).or_insert(0) += 1;
    }
    CycleStats { degree: p.degree(), counts }
}

/// Number of fixed points (the 1-cycle count).
pub fn fix_count(p: &Perm) -> usize {
    p.images.iter().enumerate().filter(|&(x, &im)| x as u32 == im).count()
}

/// Trace of the 0/1 permutation matrix of `p`, which is exactly `fix_count`.
///
/// This is the bridge from permutation statistics to matrix traces used by
/// the spectral layer.
pub fn perm_matrix_trace(p: &Perm) -> usize {
    fix_count(p)
}

/// k-fold disjoint union `∐ᵏp`: block action on k copies of the domain.
///
/// `fix_count` multiplies by k; every t-cycle count multiplies by k.
pub fn disjoint_union_power(p: &Perm, k: usize) -> Result<Perm> {
    if k == 0 {
        return Err(Error::BadArgument("power k must be ≥ 1".into()));
    }
    let d = p.degree() as u64;
    let deg = d
        .checked_mul(k as u64)
        .ok_or(Error::Overflow("disjoint_union_power degree"))?;
    if deg > POWER_DEGREE_CAP {
        return Err(Error::CapExceeded {
            what: "disjoint union degree",
            got: deg,
            cap: POWER_DEGREE_CAP,
        });
    }
    let mut images = Vec::with_capacity(deg as usize);
    for copy in 0..k as u32 {
        let off = copy * d as u32;
        images.extend(p.images.iter().map(|&x| x + off));
    }
    Ok(Perm { images })
}

/// k-fold direct product `∏ᵏp`: diagonal action on k-tuples, degree dᵏ.
///
/// A tuple is fixed iff every coordinate is, so `fix_count` is raised to the
/// k-th power exactly.
pub fn product_power(p: &Perm, k: usize) -> Result<Perm> {
    if k == 0 {
        return Err(Error::BadArgument("power k must be ≥ 1".into()));
    }
    let d = p.degree() as u64;
    let deg = d
        .checked_pow(k as u32)
        .ok_or(Error::Overflow("product_power degree"))?;
    if deg > POWER_DEGREE_CAP {
        return Err(Error::CapExceeded {
            what: "product power degree",
            got: deg,
            cap: POWER_DEGREE_CAP,
        });
    }
    // Tuples in mixed radix d, least significant digit = coordinate 0.
    let mut images = Vec::with_capacity(deg as usize);
    for m in 0..deg {
        let mut rest = m;
        let mut image = 0u64;
        let mut place = 1u64;
        for _ in 0..k {
            let digit = (rest % d) as usize;
            rest /= d;
            image += p.images[digit] as u64 * place;
            place *= d;
        }
        images.push(image as u32);
    }
    Ok(Perm { images })
}

/// Builds a permutation of degree `n` with exactly `⌊P_t·n⌋` t-cycles for
/// every t in the support of `dist`, plus one extra cycle on whatever points
/// remain (absent when none do).
///
/// `dist` must satisfy Σ t·P_t ≤ 1 exactly; the floor counts then always fit.
/// When the extra cycle happens to have a length in the support, that length's
/// census is off by one — callers tolerate ±1 per t.
pub fn realize_stats(dist: &BTreeMap<usize, Rat>, n: usize) -> Result<Perm> {
    if n == 0 {
        return Err(Error::BadArgument("degree n must be ≥ 1".into()));
    }
    let mut mass = Rat::zero();
    for (&t, p_t) in dist {
        if t == 0 {
            return Err(Error::BadDistribution("cycle length 0".into()));
        }
        if p_t.is_negative() {
            return Err(Error::BadDistribution(format!("P_{t} < 0")));
        }
        mass += Rat::from_integer(t.into()) * p_t;
    }
    if mass > Rat::one() {
        return Err(Error::BadDistribution(format!("Σ t·P_t = {mass} > 1")));
    }

    let mut images: Vec<u32> = (0..n as u32).collect();
    let mut write_cycle = |points: std::ops::Range<usize>| {
        let (lo, hi) = (points.start, points.end);
        for x in lo..hi {
            images[x] = if x + 1 < hi { x as u32 + 1 } else { lo as u32 };
        }
    };
    let mut pos = 0usize;
    for (&t, p_t) in dist {
        let count = (p_t * Rat::from_integer(n.into()))
            .floor()
            .to_integer()
            .to_usize()
            .expect("count fits: ⌊P_t·n⌋ ≤ n");
        for _ in 0..count {
            write_cycle(pos..pos + t);
            pos += t;
        }
    }
    if pos < n {
        write_cycle(pos..n);
    }
    Ok(Perm { images })
}

/// Finds `c` with `c ∘ sigma ∘ c⁻¹ = rho`, or reports non-conjugacy.
///
/// Succeeds iff the cycle types agree; the returned conjugator is checked
/// against the exact identity before being handed out.
pub fn conjugator(sigma: &Perm, rho: &Perm) -> Result<Perm> {
    if sigma.degree() != rho.degree() {
        return Err(Error::CycleTypeMismatch(format!(
            "degrees {} and {}",
            sigma.degree(),
            rho.degree()
        )));
    }
    let mut cyc_s = sigma.cycles();
    let mut cyc_r = rho.cycles();
    cyc_s.sort_by_key(|c| (c.len(), c[0]));
    cyc_r.sort_by_key(|c| (c.len(), c[0]));
    let type_s: Vec<usize> = cyc_s.iter().map(|c| c.len()).collect();
    let type_r: Vec<usize> = cyc_r.iter().map(|c| c.len()).collect();
    if type_s != type_r {
        return Err(Error::CycleTypeMismatch(format!(
            "{:?} vs {:?}",
            cycle_stats(sigma).counts,
            cycle_stats(rho).counts
        )));
    }
    let mut images = vec![0u32; sigma.degree()];
    for (cs, cr) in cyc_s.iter().zip(&cyc_r) {
        for (&a, &b) in cs.iter().zip(cr) {
            images[a as usize] = b;
        }
    }
    let c = Perm { images };
    assert_eq!(
        c.compose(sigma).compose(&c.inverse()),
        *rho,
        "conjugation identity must hold by construction"
    );
    Ok(c)
}

/// Slack in the inequality `#ₜ(α∘β) ≥ #ₜ(α) + #fix(β) − d`.
///
/// Every t-cycle of α all of whose points β fixes survives into the
/// composition, so the returned margin is never negative.
pub fn composition_bound_margin(alpha: &Perm, beta: &Perm, t: usize) -> Result<i64> {
    if alpha.degree() != beta.degree() {
        return Err(Error::Dimension(format!(
            "degrees {} and {}",
            alpha.degree(),
            beta.degree()
        )));
    }
    if t == 0 {
        return Err(Error::BadArgument("cycle length t must be ≥ 1".into()));
    }
    let d = alpha.degree() as i64;
    let count_t = |p: &Perm| *cycle_stats(p).counts.get(&t).unwrap_or(&0) as i64;
    let lhs = count_t(&alpha.compose(beta));
    let bound = count_t(alpha) + fix_count(beta) as i64 - d;
    Ok(lhs - bound)
}

/// `covering_closure(σ, k)` with the default degree cap.
pub fn covering_closure(sigma: &Perm, k: usize) -> Result<BTreeSet<Perm>> {
    covering_closure_with_cap(sigma, k, COVER_DEGREE_DEFAULT_CAP)
}

/// The set of products of **at most** `k` conjugates of the even permutation
/// `sigma` (identity-padding convention, so the result grows with `k`).
///
/// Degree is capped because the closure can be half the symmetric group.
pub fn covering_closure_with_cap(
    sigma: &Perm,
    k: usize,
    cap: usize,
) -> Result<BTreeSet<Perm>> {
    let d = sigma.degree();
    let cap = cap.min(COVER_DEGREE_HARD_CAP);
    if d > cap {
        return Err(Error::CapExceeded {
            what: "covering closure degree",
            got: d as u64,
            cap: cap as u64,
        });
    }
    if !sigma.is_even() {
        return Err(Error::BadArgument(
            "covering closure requires an even permutation".into(),
        ));
    }
    let class = conjugacy_class(sigma);
    // Breadth-first search in the Cayley graph generated by the class:
    // level j reaches exactly the products of ≤ j conjugates.
    let mut reached = BTreeSet::new();
    let mut frontier = vec![Perm::identity(d)];
    for _ in 0..k {
        let mut next = Vec::new();
        for f in &frontier {
            for c in &class {
                let prod = f.compose(c);
                if reached.insert(prod.clone()) {
                    next.push(prod);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(reached)
}

/// Conjugacy class of `sigma`: its orbit under conjugation by transpositions
/// (which generate all of Sₙ, so the orbit is the full class).
fn conjugacy_class(sigma: &Perm) -> Vec<Perm> {
    let d = sigma.degree();
    let mut seen: BTreeSet<Perm> = BTreeSet::new();
    let mut queue = vec![sigma.clone()];
    seen.insert(sigma.clone());
    while let Some(p) = queue.pop() {
        for i in 0..d {
            for j in i + 1..d {
                let t = Perm::from_cycles(d, &[&[i as u32, j as u32]])
                    .expect("transposition is valid");
                let conj = t.compose(&p).compose(&t);
                if seen.insert(conj.clone()) {
                    queue.push(conj);
                }
            }
        }
    }
    seen.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(d: usize, cycles: &[&[u32]]) -> Perm {
        Perm::from_cycles(d, cycles).unwrap()
    }

    #[test]
    fn census_basics() {
        let id5 = Perm::identity(5);
        assert_eq!(cycle_stats(&id5).counts, BTreeMap::from([(1, 5)]));

        let s = p(5, &[&[0, 1], &[2, 3, 4]]);
        assert_eq!(cycle_stats(&s).counts, BTreeMap::from([(2, 1), (3, 1)]));
        assert_eq!(fix_count(&s), 0);

        let c7 = p(7, &[&[0, 1, 2, 3, 4, 5, 6]]);
        assert_eq!(cycle_stats(&c7).counts, BTreeMap::from([(7, 1)]));
        assert_eq!(fix_count(&c7), 0);

        assert_eq!(fix_count(&Perm::identity(4)), 4);
        assert_eq!(fix_count(&p(4, &[&[0, 1]])), 2);
        assert_eq!(fix_count(&p(4, &[&[0, 1, 2, 3]])), 0);
    }

    #[test]
    fn census_mass_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in [1usize, 2, 5, 17, 40] {
            let q = Perm::random(d, &mut rng);
            let st = cycle_stats(&q);
            assert_eq!(st.counts.iter().map(|(t, c)| t * c).sum::<usize>(), d);
            let freq = st.normalized();
            let mass: Rat = freq
                .iter()
                .map(|(&t, f)| Rat::from_integer(t.into()) * f)
                .sum();
            assert_eq!(mass, Rat::one());
        }
    }

    #[test]
    fn disjoint_union_multiplies_fixes() {
        let t = p(2, &[&[0, 1]]);
        let u = disjoint_union_power(&t, 3).unwrap();
        assert_eq!(u.degree(), 6);
        assert_eq!(fix_count(&u), 0);
        assert_eq!(cycle_stats(&u).counts, BTreeMap::from([(2, 3)]));

        assert_eq!(
            disjoint_union_power(&Perm::identity(3), 2).unwrap(),
            Perm::identity(6)
        );

        let one_fix = p(3, &[&[0, 1]]);
        assert_eq!(fix_count(&disjoint_union_power(&one_fix, 2).unwrap()), 2);
    }

    #[test]
    fn product_power_exponentiates_fixes() {
        let s = p(4, &[&[0, 1]]); // #fix = 2
        let sq = product_power(&s, 2).unwrap();
        assert_eq!(sq.degree(), 16);
        assert_eq!(fix_count(&sq), 4);

        assert_eq!(product_power(&Perm::identity(3), 2).unwrap(), Perm::identity(9));

        let c3 = p(3, &[&[0, 1, 2]]);
        assert_eq!(fix_count(&product_power(&c3, 2).unwrap()), 0);

        // Mass is conserved at the power degree.
        let st = cycle_stats(&sq);
        assert_eq!(st.counts.iter().map(|(t, c)| t * c).sum::<usize>(), 16);
    }

    #[test]
    fn power_caps_enforced() {
        let q = Perm::identity(100);
        assert!(matches!(
            product_power(&q, 4),
            Err(Error::CapExceeded { .. })
        ));
        assert!(matches!(product_power(&q, 0), Err(Error::BadArgument(_))));
    }

    #[test]
    fn realize_matches_floors() {
        let dist = BTreeMap::from([(2usize, crate::rat(1, 2))]);
        let q = realize_stats(&dist, 10).unwrap();
        assert_eq!(cycle_stats(&q).counts, BTreeMap::from([(2, 5)]));

        let dist = BTreeMap::from([(3usize, crate::rat(1, 4))]);
        let q = realize_stats(&dist, 13).unwrap();
        assert_eq!(cycle_stats(&q).counts, BTreeMap::from([(3, 3), (4, 1)]));

        let q = realize_stats(&BTreeMap::new(), 5).unwrap();
        assert_eq!(cycle_stats(&q).counts, BTreeMap::from([(5, 1)]));

        let heavy = BTreeMap::from([(2usize, crate::rat(3, 4))]);
        assert!(matches!(
            realize_stats(&heavy, 10),
            Err(Error::BadDistribution(_))
        ));
    }

    #[test]
    fn conjugator_aligns_cycles() {
        let sigma = p(5, &[&[0, 1, 2]]);
        let rho = p(5, &[&[1, 3, 4]]);
        let c = conjugator(&sigma, &rho).unwrap();
        assert_eq!(c.compose(&sigma).compose(&c.inverse()), rho);

        let c = conjugator(&sigma, &sigma).unwrap();
        assert_eq!(c.compose(&sigma).compose(&c.inverse()), sigma);

        let tau = p(3, &[&[0, 1]]);
        let three = p(3, &[&[0, 1, 2]]);
        assert!(matches!(
            conjugator(&tau, &three),
            Err(Error::CycleTypeMismatch(_))
        ));
    }

    #[test]
    fn composition_margin_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let alpha = Perm::random(5, &mut rng);
        for t in 1..=5 {
            assert_eq!(
                composition_bound_margin(&alpha, &Perm::identity(5), t).unwrap(),
                0
            );
        }

        let m = composition_bound_margin(&Perm::identity(4), &p(4, &[&[0, 1]]), 1)
            .unwrap();
        assert_eq!(m, 0);

        for _ in 0..50 {
            let a = Perm::random(8, &mut rng);
            let b = Perm::random(8, &mut rng);
            for t in 1..=3 {
                assert!(composition_bound_margin(&a, &b, t).unwrap() >= 0);
            }
        }
    }

    #[test]
    fn covering_closure_small_cases() {
        // Double transposition in A₅: its products of ≤ 4 conjugates fill A₅.
        let sigma = p(5, &[&[0, 1], &[2, 3]]);
        let closure = covering_closure(&sigma, 4).unwrap();
        assert_eq!(closure.len(), 60);

        let id = Perm::identity(5);
        let closure = covering_closure(&id, 4).unwrap();
        assert_eq!(closure, BTreeSet::from([id]));

        let sigma = p(4, &[&[0, 1], &[2, 3]]);
        // In A₄ the class of (1 2)(3 4) only generates the Klein group.
        let closure = covering_closure(&sigma, 4).unwrap();
        assert_eq!(closure.len(), 4);

        let odd = p(5, &[&[0, 1]]);
        assert!(matches!(
            covering_closure(&odd, 4),
            Err(Error::BadArgument(_))
        ));
    }

    #[test]
    fn trace_is_fix_count() {
        assert_eq!(perm_matrix_trace(&Perm::identity(3)), 3);
        assert_eq!(perm_matrix_trace(&p(3, &[&[0, 1, 2]])), 0);
        assert_eq!(perm_matrix_trace(&p(5, &[&[0, 1]])), 3);
    }

    #[test]
    fn serde_one_based_roundtrip() {
        let q = p(4, &[&[0, 2, 1]]);
        let js = serde_json::to_string(&q).unwrap();
        assert_eq!(js, "[3,1,2,4]");
        let back: Perm = serde_json::from_str(&js).unwrap();
        assert_eq!(back, q);
        assert!(serde_json::from_str::<Perm>("[1,1,2]").is_err());
        assert!(serde_json::from_str::<Perm>("[0,1]").is_err());
    }
}
