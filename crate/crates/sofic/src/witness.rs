//! Sofic witnesses: almost-multiplicative, almost-fixed-point-free maps into
//! symmetric groups, with exact rational quality accounting and power
//! amplification.
//!
//! A witness stores a permutation for every element of a finite domain `D`
//! and distinguishes the check set `F ⊆ D` over which the two defining
//! conditions are quantified:
//!
//! * multiplicativity — for all `e, f ∈ F`, `#fix(φ(e)φ(f)φ(ef)⁻¹) ≥ (1−ε)n`,
//!   which forces `ef ∈ D` (missing products are an error, never skipped);
//! * freeness — for all `e ∈ F` other than the identity, `#fix(φ(e)) ≤ εn`.
//!
//! Amplification replaces every permutation by its k-fold direct product.
//! Because `∏ᵏ` is a homomorphism with `#fix(∏ᵏα) = #fix(α)ᵏ`, both quality
//! ratios are raised to the k-th power *exactly*.

use std::collections::BTreeMap;

use num_traits::One;

use crate::approx::{quotient_graph, LabeledGraph};
use crate::groups::{Elem, MarkedGroup};
use crate::permcalc::{fix_count, product_power, Perm};
use crate::{rat, Error, Rat, Result};

/// A finite permutation model of a marked group.
#[derive(Clone, Debug)]
pub struct SoficWitness {
    pub group: MarkedGroup,
    /// Permutation degree.
    pub n: usize,
    /// The map φ on its full domain `D`.
    map: BTreeMap<Elem, Perm>,
    /// The check set `F`; products of its pairs must lie in `D`.
    f_list: Vec<Elem>,
    /// Quality target for pass/fail reporting.
    pub epsilon: Rat,
}

/// Exact quality report for a witness.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessReport {
    /// min over pairs e,f ∈ F of `#fix(φ(e)φ(f)φ(ef)⁻¹)/n` (1 when no pairs).
    pub multiplicativity: Rat,
    /// max over identity ≠ e ∈ F of `#fix(φ(e))/n` (0 when none).
    pub freeness: Rat,
    /// φ(identity) = identity whenever the identity is mapped.
    pub identity_ok: bool,
    pub pairs_checked: usize,
    /// multiplicativity ≥ 1−ε, freeness ≤ ε, and `identity_ok`.
    pub pass: bool,
}

impl SoficWitness {
    /// Builds a witness; `f_list = None` means `F` is the whole domain.
    ///
    /// The identity is always added to the domain (mapped to the identity
    /// permutation) when absent, and a mapped identity must be the identity
    /// permutation.
    pub fn new(
        group: MarkedGroup,
        n: usize,
        mut map: BTreeMap<Elem, Perm>,
        f_list: Option<Vec<Elem>>,
        epsilon: Rat,
    ) -> Result<SoficWitness> {
        if n == 0 {
            return Err(Error::BadArgument("witness degree must be ≥ 1".into()));
        }
        for (e, p) in &map {
            if p.degree() != n {
                return Err(Error::Dimension(format!(
                    "φ({e}) has degree {}, witness degree is {n}",
                    p.degree()
                )));
            }
        }
        let id = group.identity();
        match map.get(&id) {
            Some(p) if !p.is_identity() => {
                return Err(Error::BadWitness("φ(identity) is not the identity".into()))
            }
            None => {
                map.insert(id.clone(), Perm::identity(n));
            }
            _ => {}
        }
        let f_list = match f_list {
            Some(f) => {
                for e in &f {
                    if !map.contains_key(e) {
                        return Err(Error::MissingEntry(format!("check element {e}")));
                    }
                }
                f
            }
            None => map.keys().cloned().collect(),
        };
        Ok(SoficWitness { group, n, map, f_list, epsilon })
    }

    /// Full domain `D` of φ.
    pub fn domain(&self) -> impl Iterator<Item = &Elem> {
        self.map.keys()
    }

    /// The check set `F`.
    pub fn check_set(&self) -> &[Elem] {
        &self.f_list
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Elem, &Perm)> {
        self.map.iter()
    }

    pub fn image(&self, e: &Elem) -> Option<&Perm> {
        self.map.get(e)
    }
}

/// Exact verification of the witness conditions at `w.epsilon`.
///
/// Errors when a required product `ef` is missing from the domain: skipping
/// pairs would silently weaken the certificate.
pub fn verify_witness(w: &SoficWitness) -> Result<WitnessReport> {
    let n = rat(w.n as i64, 1);
    let id = w.group.identity();
    let identity_ok = w.map.get(&id).map(Perm::is_identity).unwrap_or(true);

    let mut multiplicativity = Rat::one();
    let mut pairs_checked = 0usize;
    for e in &w.f_list {
        for f in &w.f_list {
            let ef = w.group.mul(e, f);
            let pe = &w.map[e];
            let pf = &w.map[f];
            let pef = w
                .map
                .get(&ef)
                .ok_or_else(|| Error::MissingEntry(format!("product {e}·{f} = {ef}")))?;
            let defect = pe.compose(pf).compose(&pef.inverse());
            let ratio = rat(fix_count(&defect) as i64, 1) / &n;
            if ratio < multiplicativity {
                multiplicativity = ratio;
            }
            pairs_checked += 1;
        }
    }

    let mut freeness = rat(0, 1);
    for e in &w.f_list {
        if *e == id {
            continue;
        }
        let ratio = rat(fix_count(&w.map[e]) as i64, 1) / &n;
        if ratio > freeness {
            freeness = ratio;
        }
    }

    let pass = identity_ok
        && multiplicativity >= Rat::one() - &w.epsilon
        && freeness <= w.epsilon;
    Ok(WitnessReport { multiplicativity, freeness, identity_ok, pairs_checked, pass })
}

/// k-fold power amplification: every permutation is replaced by `∏ᵏ` of
/// itself, the degree becomes nᵏ, and both quality ratios are raised to the
/// k-th power exactly.
pub fn amplify(w: &SoficWitness, k: usize) -> Result<SoficWitness> {
    let mut map = BTreeMap::new();
    for (e, p) in &w.map {
        map.insert(e.clone(), product_power(p, k)?);
    }
    let n = w.n.pow(k as u32);
    Ok(SoficWitness {
        group: w.group.clone(),
        n,
        map,
        f_list: w.f_list.clone(),
        epsilon: w.epsilon.clone(),
    })
}

/// Minimal `k` with `δᵏ < ε` and `(1−ξ)ᵏ > 1−ε`, where δ bounds the freeness
/// ratio and 1−ξ the multiplicativity ratio of the witness to be amplified.
pub fn choose_amplification(delta: &Rat, xi: &Rat, epsilon: &Rat) -> Result<usize> {
    let zero = rat(0, 1);
    let one = Rat::one();
    if *delta <= zero || *delta >= one {
        return Err(Error::BadArgument("need 0 < δ < 1".into()));
    }
    if *xi < zero || *xi >= one {
        return Err(Error::BadArgument("need 0 ≤ ξ < 1".into()));
    }
    if *epsilon <= zero || *epsilon >= one {
        return Err(Error::BadArgument("need 0 < ε < 1".into()));
    }
    let target = &one - epsilon;
    let base = &one - xi;
    let mut dk = delta.clone();
    let mut xk = base.clone();
    for k in 1..=100_000usize {
        if xk <= target {
            return Err(Error::Infeasible(format!(
                "(1−ξ)^{k} has already dropped to 1−ε before δ^k < ε"
            )));
        }
        if dk < *epsilon {
            return Ok(k);
        }
        dk *= delta;
        xk *= &base;
    }
    Err(Error::Infeasible("no k below the iteration cap".into()))
}

/// Builds a witness from a genuine finite quotient: `hom` lists one
/// permutation per label (inverse labels must carry inverse permutations).
///
/// The map is evaluated along words, which is well defined because `hom` is a
/// homomorphism; the domain is closed as `F ∪ F·F ∪ {1}` so that every
/// multiplicativity pair is checkable, and the ratio is exactly 1.
pub fn witness_from_quotient(
    group: &MarkedGroup,
    hom: &[Perm],
    f_list: &[Elem],
    epsilon: Rat,
) -> Result<SoficWitness> {
    let m = group.generator_count();
    if hom.len() != m {
        return Err(Error::Dimension(format!(
            "need {} label permutations, got {}",
            m,
            hom.len()
        )));
    }
    let n = hom[0].degree();
    if hom.iter().any(|p| p.degree() != n) {
        return Err(Error::Dimension("label permutations of unequal degree".into()));
    }
    for i in 0..m {
        if hom[group.pair(i)] != hom[i].inverse() {
            return Err(Error::Involution(format!(
                "labels {} and {} do not carry inverse permutations",
                i + 1,
                group.pair(i) + 1
            )));
        }
    }

    let eval = |e: &Elem| -> Result<Perm> {
        let word = group.word_for(e)?;
        let mut p = Perm::identity(n);
        for &i in &word {
            p = p.compose(&hom[i as usize]);
        }
        Ok(p)
    };

    let mut map = BTreeMap::new();
    for e in f_list {
        map.insert(e.clone(), eval(e)?);
    }
    for e in f_list {
        for f in f_list {
            let ef = group.mul(e, f);
            if !map.contains_key(&ef) {
                map.insert(ef.clone(), eval(&ef)?);
            }
        }
    }
    SoficWitness::new(group.clone(), n, map, Some(f_list.to_vec()), epsilon)
}

/// Bridges a witness to the graph picture: labels of the graph are the
/// witness permutations of the base generators, with inverse labels acting by
/// the exact inverse permutations (the graph structure is what carries the
/// involution, so φ of an inverse generator — which may differ slightly — is
/// not consulted).
pub fn witness_to_graph(w: &SoficWitness) -> Result<LabeledGraph> {
    let m = w.group.generator_count();
    let half = m / 2;
    let mut hom = Vec::with_capacity(m);
    for i in 0..half {
        let gen = w.group.word_reduce(&[i as u16])?;
        let p = w
            .map
            .get(&gen)
            .ok_or_else(|| Error::MissingEntry(format!("generator {}", i + 1)))?;
        hom.push(p.clone());
    }
    for i in 0..half {
        hom.push(hom[i].inverse());
    }
    let mut g = quotient_graph(&w.group, &hom)?;
    g.meta.source = format!("witness({}, n={})", w.group.name(), w.n);
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Letter;

    fn cycle_hom(n: usize) -> Vec<Perm> {
        let shift = Perm::from_images((0..n as u32).map(|i| (i + 1) % n as u32).collect())
            .unwrap();
        vec![shift.clone(), shift.inverse()]
    }

    fn elems(group: &MarkedGroup, words: &[&[Letter]]) -> Vec<Elem> {
        words.iter().map(|w| group.word_reduce(w).unwrap()).collect()
    }

    #[test]
    fn regular_representation_is_perfect() {
        let z3 = MarkedGroup::lattice_quotient(vec![3]).unwrap();
        let f = elems(&z3, &[&[], &[0], &[0, 0]]);
        let w = witness_from_quotient(&z3, &cycle_hom(3), &f, rat(1, 100)).unwrap();
        let r = verify_witness(&w).unwrap();
        assert_eq!(r.multiplicativity, rat(1, 1));
        assert_eq!(r.freeness, rat(0, 1));
        assert!(r.identity_ok && r.pass);
        assert_eq!(r.pairs_checked, 9);
    }

    #[test]
    fn constant_identity_witness_fails() {
        let z = MarkedGroup::lattice(1).unwrap();
        let id4 = Perm::identity(4);
        let mut map = BTreeMap::new();
        for w in [&[][..], &[0][..], &[1][..]] {
            map.insert(z.word_reduce(w).unwrap(), id4.clone());
        }
        let f = elems(&z, &[&[], &[0]]);
        // Domain must contain s² for the (s,s) pair.
        map.insert(z.word_reduce(&[0, 0]).unwrap(), id4.clone());
        let w = SoficWitness::new(z, 4, map, Some(f), rat(1, 2)).unwrap();
        let r = verify_witness(&w).unwrap();
        assert_eq!(r.freeness, rat(1, 1));
        assert_eq!(r.multiplicativity, rat(1, 1));
        assert!(!r.pass);
    }

    #[test]
    fn six_cycle_z_witness() {
        let z = MarkedGroup::lattice(1).unwrap();
        let f = elems(&z, &[&[], &[0], &[1]]);
        let w = witness_from_quotient(&z, &cycle_hom(6), &f, rat(1, 10)).unwrap();
        // Domain was closed: it now has s±2 as products.
        assert_eq!(w.domain().count(), 5);
        let r = verify_witness(&w).unwrap();
        assert_eq!(r.multiplicativity, rat(1, 1));
        assert_eq!(r.freeness, rat(0, 1));
    }

    #[test]
    fn missing_product_is_an_error() {
        let z = MarkedGroup::lattice(1).unwrap();
        let shift = cycle_hom(6).remove(0);
        let mut map = BTreeMap::new();
        map.insert(z.word_reduce(&[0]).unwrap(), shift);
        let w = SoficWitness::new(z, 6, map, None, rat(1, 10)).unwrap();
        // F = D = {1, s}; the pair (s,s) needs s², which is absent.
        assert!(matches!(verify_witness(&w), Err(Error::MissingEntry(_))));
    }

    /// Witness with freeness exactly 1/2: φ(s) is a transposition on 4
    /// points, φ(s²) = φ(s)² = identity, and F = {s} only.
    fn half_free_witness() -> SoficWitness {
        let z = MarkedGroup::lattice(1).unwrap();
        let t = Perm::from_cycles(4, &[&[0, 1]]).unwrap();
        let mut map = BTreeMap::new();
        map.insert(z.word_reduce(&[0]).unwrap(), t.clone());
        map.insert(z.word_reduce(&[0, 0]).unwrap(), t.compose(&t));
        let f = vec![z.word_reduce(&[0]).unwrap()];
        SoficWitness::new(z, 4, map, Some(f), rat(1, 4)).unwrap()
    }

    #[test]
    fn amplification_cubes_the_ratios() {
        let w = half_free_witness();
        let before = verify_witness(&w).unwrap();
        assert_eq!(before.multiplicativity, rat(1, 1));
        assert_eq!(before.freeness, rat(1, 2));

        let w3 = amplify(&w, 3).unwrap();
        assert_eq!(w3.n, 64);
        let after = verify_witness(&w3).unwrap();
        assert_eq!(after.freeness, rat(1, 8));
        assert_eq!(after.multiplicativity, rat(1, 1));
        assert!(after.pass); // 1/8 ≤ 1/4

        // Ratios are powers *exactly*, also through composition of amplifies.
        let w6 = amplify(&w3, 2).unwrap();
        let w6_direct = amplify(&w, 6).unwrap();
        assert_eq!(
            verify_witness(&w6).unwrap().freeness,
            verify_witness(&w6_direct).unwrap().freeness
        );
        assert_eq!(verify_witness(&w6).unwrap().freeness, rat(1, 64));
    }

    #[test]
    fn amplification_k_selection() {
        assert_eq!(
            choose_amplification(&rat(1, 2), &rat(0, 1), &rat(1, 10)).unwrap(),
            4
        );
        assert_eq!(
            choose_amplification(&rat(9, 10), &rat(1, 100), &rat(1, 2)).unwrap(),
            7
        );
        assert!(choose_amplification(&rat(1, 2), &rat(0, 1), &rat(3, 2)).is_err());
        // ξ so large that multiplicativity collapses before freeness clears.
        assert!(matches!(
            choose_amplification(&rat(99, 100), &rat(1, 2), &rat(1, 10)),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn graph_bridge_matches_torus() {
        let z = MarkedGroup::lattice(1).unwrap();
        let f = elems(&z, &[&[0]]);
        let w = witness_from_quotient(&z, &cycle_hom(5), &f, rat(1, 10)).unwrap();
        let g = witness_to_graph(&w).unwrap();
        let t = crate::approx::torus_graph(1, 5).unwrap();
        for i in 0..2 {
            assert_eq!(g.label_map(i), t.label_map(i));
        }
    }
}
