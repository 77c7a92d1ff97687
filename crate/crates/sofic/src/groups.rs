//! Marked groups as evaluable word oracles.
//!
//! A marked group carries an ordered symmetric generator list (each label is
//! paired with its formal inverse) and an evaluator that maps words to
//! decidable normal forms. Supported families: lattices ℤᵈ, their finite
//! quotients, free groups F_k, and finite permutation groups. On top of the
//! oracle sit Cayley balls, relation enumeration, and the dyadic relation
//! metric on marked groups with a fixed generator count.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::permcalc::Perm;
use crate::{Error, Result};

/// Letters of a word are label indices `0..m`; labels `half..m` are the
/// formal inverses of labels `0..half`.
pub type Letter = u16;

/// Cap on Σ_{ℓ≤R} mᶫ when enumerating relation words.
pub const DEFAULT_WORD_CAP: u128 = 10_000_000;

/// Canonical normal form of a group element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    /// Reduced word over the labels (free groups).
    Word(Vec<Letter>),
    /// Lattice point, reduced mod the moduli in quotients.
    Point(Vec<i64>),
    /// Element of a finite permutation group.
    Perm(Perm),
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Word(w) => {
                if w.is_empty() {
                    return write!(f, "ε");
                }
                write!(f, "w(")?;
                for (k, i) in w.iter().enumerate() {
                    if k > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{}", i + 1)?;
                }
                write!(f, ")")
            }
            Elem::Point(v) => {
                write!(f, "(")?;
                for (k, x) in v.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            Elem::Perm(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Family {
    Lattice { d: usize },
    LatticeQuotient { moduli: Vec<i64> },
    Free { rank: usize },
    /// `label_perms` holds all 2k labels: the k generators then their inverses.
    PermGroup { degree: usize, label_perms: Vec<Perm> },
}

/// Serializable description of a marking, convertible to and from
/// [`MarkedGroup`] (the shape the JSON front ends read and write).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupDescriptor {
    Lattice { d: usize },
    LatticeQuotient { moduli: Vec<i64> },
    Free { rank: usize },
    PermGroup { gens: Vec<Perm> },
}

/// A group with an ordered symmetric generator system.
///
/// Labels `0..m/2` are the chosen generators, labels `m/2..m` their inverses,
/// so the involution pairing is always `i ↔ i + m/2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedGroup {
    family: Family,
    m: usize,
}

impl MarkedGroup {
    /// Free abelian lattice ℤᵈ with the standard basis marking.
    pub fn lattice(d: usize) -> Result<MarkedGroup> {
        if d == 0 {
            return Err(Error::BadArgument("lattice rank must be ≥ 1".into()));
        }
        Ok(MarkedGroup { family: Family::Lattice { d }, m: 2 * d })
    }

    /// Finite quotient ℤᵈ/(n₁ℤ × … × n_dℤ); every modulus ≥ 1.
    pub fn lattice_quotient(moduli: Vec<i64>) -> Result<MarkedGroup> {
        if moduli.is_empty() {
            return Err(Error::BadArgument("need at least one modulus".into()));
        }
        if moduli.iter().any(|&n| n < 1) {
            return Err(Error::BadArgument("moduli must be ≥ 1".into()));
        }
        let m = 2 * moduli.len();
        Ok(MarkedGroup { family: Family::LatticeQuotient { moduli }, m })
    }

    /// Free group F_k on the standard marking.
    pub fn free(rank: usize) -> Result<MarkedGroup> {
        if rank == 0 {
            return Err(Error::BadArgument("free rank must be ≥ 1".into()));
        }
        Ok(MarkedGroup { family: Family::Free { rank }, m: 2 * rank })
    }

    /// Finite permutation group generated (and marked) by `gens`.
    pub fn perm_group(gens: Vec<Perm>) -> Result<MarkedGroup> {
        if gens.is_empty() {
            return Err(Error::BadArgument("need at least one generator".into()));
        }
        let degree = gens[0].degree();
        if gens.iter().any(|g| g.degree() != degree) {
            return Err(Error::Dimension("generators of unequal degree".into()));
        }
        let m = 2 * gens.len();
        let mut label_perms = gens.clone();
        label_perms.extend(gens.iter().map(Perm::inverse));
        Ok(MarkedGroup { family: Family::PermGroup { degree, label_perms }, m })
    }

    /// Number of labels (generators and their inverses).
    pub fn generator_count(&self) -> usize {
        self.m
    }

    /// Index of the inverse label.
    pub fn pair(&self, i: usize) -> usize {
        (i + self.m / 2) % self.m
    }

    /// Short human-readable family tag for artifact metadata.
    pub fn name(&self) -> String {
        match &self.family {
            Family::Lattice { d } => format!("Z^{d}"),
            Family::LatticeQuotient { moduli } => {
                let parts: Vec<String> = moduli.iter().map(|n| format!("Z/{n}")).collect();
                parts.join("x")
            }
            Family::Free { rank } => format!("F_{rank}"),
            Family::PermGroup { degree, label_perms } => {
                format!("perm<{}, {} gens>", degree, label_perms.len() / 2)
            }
        }
    }

    /// True when the underlying group is finite (quotients and perm groups).
    pub fn is_finite(&self) -> bool {
        matches!(
            self.family,
            Family::LatticeQuotient { .. } | Family::PermGroup { .. }
        )
    }

    /// Serializable view of the marking.
    pub fn descriptor(&self) -> GroupDescriptor {
        match &self.family {
            Family::Lattice { d } => GroupDescriptor::Lattice { d: *d },
            Family::LatticeQuotient { moduli } => GroupDescriptor::LatticeQuotient {
                moduli: moduli.clone(),
            },
            Family::Free { rank } => GroupDescriptor::Free { rank: *rank },
            Family::PermGroup { label_perms, .. } => GroupDescriptor::PermGroup {
                gens: label_perms[..label_perms.len() / 2].to_vec(),
            },
        }
    }

    /// Rebuilds a group from its serializable view.
    pub fn from_descriptor(desc: GroupDescriptor) -> Result<MarkedGroup> {
        match desc {
            GroupDescriptor::Lattice { d } => MarkedGroup::lattice(d),
            GroupDescriptor::LatticeQuotient { moduli } => MarkedGroup::lattice_quotient(moduli),
            GroupDescriptor::Free { rank } => MarkedGroup::free(rank),
            GroupDescriptor::PermGroup { gens } => MarkedGroup::perm_group(gens),
        }
    }

    pub fn identity(&self) -> Elem {
        match &self.family {
            Family::Lattice { d } => Elem::Point(vec![0; *d]),
            Family::LatticeQuotient { moduli } => Elem::Point(vec![0; moduli.len()]),
            Family::Free { .. } => Elem::Word(Vec::new()),
            Family::PermGroup { degree, .. } => Elem::Perm(Perm::identity(*degree)),
        }
    }

    fn check_letter(&self, i: usize) -> Result<()> {
        if i >= self.m {
            return Err(Error::BadGenerator(format!(
                "label {} of {}",
                i + 1,
                self.m
            )));
        }
        Ok(())
    }

    /// Left multiplication by a generator: `s_i · e`.
    pub fn mul_gen_left(&self, i: usize, e: &Elem) -> Elem {
        match (&self.family, e) {
            (Family::Lattice { .. } | Family::LatticeQuotient { .. }, Elem::Point(_)) => {
                self.point_step(e, i)
            }
            (Family::Free { .. }, Elem::Word(w)) => {
                let i = i as Letter;
                let pair = self.pair(i as usize) as Letter;
                let mut w = w.clone();
                if w.first() == Some(&pair) {
                    w.remove(0);
                } else {
                    w.insert(0, i);
                }
                Elem::Word(w)
            }
            (Family::PermGroup { label_perms, .. }, Elem::Perm(p)) => {
                Elem::Perm(label_perms[i].compose(p))
            }
            _ => unreachable!("element shape matches family"),
        }
    }

    /// Right multiplication by a generator: `e · s_i`.
    pub fn mul_gen_right(&self, e: &Elem, i: usize) -> Elem {
        match (&self.family, e) {
            (Family::Lattice { .. } | Family::LatticeQuotient { .. }, Elem::Point(_)) => {
                self.point_step(e, i)
            }
            (Family::Free { .. }, Elem::Word(w)) => {
                let i = i as Letter;
                let pair = self.pair(i as usize) as Letter;
                let mut w = w.clone();
                if w.last() == Some(&pair) {
                    w.pop();
                } else {
                    w.push(i);
                }
                Elem::Word(w)
            }
            (Family::PermGroup { label_perms, .. }, Elem::Perm(p)) => {
                Elem::Perm(p.compose(&label_perms[i]))
            }
            _ => unreachable!("element shape matches family"),
        }
    }

    fn point_step(&self, e: &Elem, i: usize) -> Elem {
        let Elem::Point(v) = e else { unreachable!() };
        let d = v.len();
        let (coord, delta) = if i < d { (i, 1) } else { (i - d, -1) };
        let mut v = v.clone();
        v[coord] += delta;
        if let Family::LatticeQuotient { moduli } = &self.family {
            v[coord] = v[coord].rem_euclid(moduli[coord]);
        }
        Elem::Point(v)
    }

    /// Evaluates a word to its canonical normal form.
    ///
    /// Two words reduce to equal forms iff they represent the same element.
    pub fn word_reduce(&self, word: &[Letter]) -> Result<Elem> {
        let mut acc = self.identity();
        for &i in word {
            self.check_letter(i as usize)?;
            acc = self.mul_gen_right(&acc, i as usize);
        }
        Ok(acc)
    }

    /// Product of two normal forms.
    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (&self.family, a, b) {
            (Family::Lattice { .. }, Elem::Point(u), Elem::Point(v)) => {
                Elem::Point(u.iter().zip(v).map(|(x, y)| x + y).collect())
            }
            (Family::LatticeQuotient { moduli }, Elem::Point(u), Elem::Point(v)) => {
                Elem::Point(
                    u.iter()
                        .zip(v)
                        .zip(moduli)
                        .map(|((x, y), &n)| (x + y).rem_euclid(n))
                        .collect(),
                )
            }
            (Family::Free { .. }, Elem::Word(_), Elem::Word(v)) => {
                let mut acc = a.clone();
                for &i in v {
                    acc = self.mul_gen_right(&acc, i as usize);
                }
                acc
            }
            (Family::PermGroup { .. }, Elem::Perm(p), Elem::Perm(q)) => {
                Elem::Perm(p.compose(q))
            }
            _ => unreachable!("element shapes match family"),
        }
    }

    /// Inverse of a normal form.
    pub fn inv(&self, a: &Elem) -> Elem {
        match (&self.family, a) {
            (Family::Lattice { .. }, Elem::Point(u)) => {
                Elem::Point(u.iter().map(|x| -x).collect())
            }
            (Family::LatticeQuotient { moduli }, Elem::Point(u)) => Elem::Point(
                u.iter()
                    .zip(moduli)
                    .map(|(x, &n)| (-x).rem_euclid(n))
                    .collect(),
            ),
            (Family::Free { .. }, Elem::Word(w)) => Elem::Word(
                w.iter()
                    .rev()
                    .map(|&i| self.pair(i as usize) as Letter)
                    .collect(),
            ),
            (Family::PermGroup { .. }, Elem::Perm(p)) => Elem::Perm(p.inverse()),
            _ => unreachable!("element shape matches family"),
        }
    }

    /// Geodesic word length of an element (its ball radius).
    pub fn word_length(&self, e: &Elem) -> Result<usize> {
        match (&self.family, e) {
            (Family::Lattice { .. }, Elem::Point(u)) => {
                Ok(u.iter().map(|x| x.unsigned_abs() as usize).sum())
            }
            (Family::LatticeQuotient { moduli }, Elem::Point(u)) => Ok(u
                .iter()
                .zip(moduli)
                .map(|(&x, &n)| (x.min(n - x)) as usize)
                .sum()),
            (Family::Free { .. }, Elem::Word(w)) => Ok(w.len()),
            (Family::PermGroup { .. }, _) => Ok(self.word_for(e)?.len()),
            _ => unreachable!("element shape matches family"),
        }
    }

    /// Some word evaluating to `e` (geodesic where cheap to produce).
    ///
    /// Errors with `Infeasible` when `e` is not generated (possible only for
    /// permutation-group elements outside the generated subgroup).
    pub fn word_for(&self, e: &Elem) -> Result<Vec<Letter>> {
        match (&self.family, e) {
            (Family::Lattice { .. } | Family::LatticeQuotient { .. }, Elem::Point(u)) => {
                let d = u.len();
                let moduli = match &self.family {
                    Family::LatticeQuotient { moduli } => Some(moduli),
                    _ => None,
                };
                let mut word = Vec::new();
                for (coord, &x) in u.iter().enumerate() {
                    // In a quotient, go the short way around the cycle.
                    let steps = match moduli {
                        Some(m) if x > m[coord] - x => x - m[coord],
                        _ => x,
                    };
                    let letter = if steps >= 0 { coord } else { coord + d } as Letter;
                    for _ in 0..steps.unsigned_abs() {
                        word.push(letter);
                    }
                }
                Ok(word)
            }
            (Family::Free { .. }, Elem::Word(w)) => Ok(w.clone()),
            (Family::PermGroup { .. }, _) => {
                // Breadth-first search, doubling the radius until the ball
                // saturates (the group is finite).
                let mut r = 1;
                loop {
                    let ball = self.ball(r);
                    if let Some(v) = ball.position(e) {
                        return Ok(ball.word_of(v));
                    }
                    let bigger = self.ball(2 * r);
                    if bigger.len() == ball.len() {
                        return Err(Error::Infeasible(format!(
                            "element {e} is not in the generated subgroup"
                        )));
                    }
                    if let Some(v) = bigger.position(e) {
                        return Ok(bigger.word_of(v));
                    }
                    r *= 2;
                }
            }
            _ => unreachable!("element shape matches family"),
        }
    }

    /// Ball of radius `r` in the Cayley graph (left multiplication edges).
    pub fn ball(&self, r: usize) -> BallGraph {
        let mut elems = vec![self.identity()];
        let mut dist = vec![0usize];
        let mut index = HashMap::new();
        index.insert(self.identity(), 0usize);
        let mut head = 0;
        while head < elems.len() {
            if dist[head] == r {
                break; // BFS order: everything past here is at distance r too
            }
            for i in 0..self.m {
                let y = self.mul_gen_left(i, &elems[head].clone());
                if !index.contains_key(&y) {
                    index.insert(y.clone(), elems.len());
                    dist.push(dist[head] + 1);
                    elems.push(y);
                }
            }
            head += 1;
        }
        let mut edges = vec![vec![None; self.m]; elems.len()];
        for (v, e) in elems.iter().enumerate() {
            for (i, slot) in edges[v].iter_mut().enumerate() {
                let y = self.mul_gen_left(i, e);
                *slot = index.get(&y).map(|&t| t as u32);
            }
        }
        let pairing = (0..self.m).map(|i| self.pair(i)).collect();
        BallGraph { radius: r, elems, dist, edges, index, pairing }
    }

    /// All words of length ≤ `r` that evaluate to the identity.
    pub fn relations_up_to(&self, r: usize) -> Result<BTreeSet<Vec<Letter>>> {
        let profile = self.relation_profile(r, DEFAULT_WORD_CAP)?;
        Ok(profile.into_iter().flatten().collect())
    }

    /// Identity words grouped by exact length: `out[ℓ]` holds the length-ℓ
    /// relations. Guarded by `cap` on the total number of words visited.
    pub fn relation_profile(
        &self,
        r: usize,
        cap: u128,
    ) -> Result<Vec<BTreeSet<Vec<Letter>>>> {
        let mut total: u128 = 0;
        let mut pw: u128 = 1;
        for _ in 0..=r {
            total += pw;
            pw = pw.saturating_mul(self.m as u128);
            if total > cap {
                return Err(Error::CapExceeded {
                    what: "relation enumeration words",
                    got: u64::MAX,
                    cap: cap.min(u64::MAX as u128) as u64,
                });
            }
        }
        let id = self.identity();
        let mut out = vec![BTreeSet::new(); r + 1];
        let mut word: Vec<Letter> = Vec::new();
        self.relation_dfs(r, &id, &self.identity(), &mut word, &mut out);
        Ok(out)
    }

    fn relation_dfs(
        &self,
        r: usize,
        id: &Elem,
        at: &Elem,
        word: &mut Vec<Letter>,
        out: &mut [BTreeSet<Vec<Letter>>],
    ) {
        if at == id {
            out[word.len()].insert(word.clone());
        }
        if word.len() == r {
            return;
        }
        for i in 0..self.m {
            word.push(i as Letter);
            let next = self.mul_gen_right(at, i);
            self.relation_dfs(r, id, &next, word, out);
            word.pop();
        }
    }
}

/// Outcome of the dyadic relation metric on marked groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GhDistance {
    /// Relation sets agree for all lengths ≤ `agree_radius` and differ at
    /// `agree_radius + 1`; the distance is `2^{-agree_radius}`.
    Dyadic { agree_radius: usize },
    /// No discrepancy found up to the probe limit.
    IndistinguishableUpTo { r_max: usize },
}

impl GhDistance {
    /// Numeric distance, or `None` for the indistinguishable sentinel.
    pub fn value(&self) -> Option<f64> {
        match self {
            GhDistance::Dyadic { agree_radius } => Some(0.5f64.powi(*agree_radius as i32)),
            GhDistance::IndistinguishableUpTo { .. } => None,
        }
    }
}

impl fmt::Display for GhDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GhDistance::Dyadic { agree_radius } => write!(f, "2^-{agree_radius}"),
            GhDistance::IndistinguishableUpTo { r_max } => {
                write!(f, "indistinguishable up to length {r_max}")
            }
        }
    }
}

/// Distance `2^{-R}` where `R` is the largest length with identical relation
/// sets, probing lengths up to `r_max`.
pub fn gh_distance(a: &MarkedGroup, b: &MarkedGroup, r_max: usize) -> Result<GhDistance> {
    if a.generator_count() != b.generator_count() {
        return Err(Error::MarkingMismatch(format!(
            "{} vs {} labels",
            a.generator_count(),
            b.generator_count()
        )));
    }
    let pa = a.relation_profile(r_max, DEFAULT_WORD_CAP)?;
    let pb = b.relation_profile(r_max, DEFAULT_WORD_CAP)?;
    for len in 0..=r_max {
        if pa[len] != pb[len] {
            debug_assert!(len > 0, "length-0 relation sets always agree");
            return Ok(GhDistance::Dyadic { agree_radius: len - 1 });
        }
    }
    Ok(GhDistance::IndistinguishableUpTo { r_max })
}

/// The ball of radius `r` in a Cayley graph, with labeled edges
/// `x →ᵢ y` whenever `y = sᵢ·x` and both endpoints lie in the ball.
#[derive(Clone, Debug)]
pub struct BallGraph {
    pub radius: usize,
    /// Vertex 0 is the identity; vertices appear in BFS order.
    pub elems: Vec<Elem>,
    /// Word length of each vertex.
    pub dist: Vec<usize>,
    edges: Vec<Vec<Option<u32>>>,
    index: HashMap<Elem, usize>,
    pairing: Vec<usize>,
}

impl BallGraph {
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a ball always contains the identity
    }

    pub fn labels(&self) -> usize {
        self.pairing.len()
    }

    pub fn pair(&self, i: usize) -> usize {
        self.pairing[i]
    }

    /// Target of the label-`i` edge out of `v`, if inside the ball.
    pub fn edge(&self, v: usize, i: usize) -> Option<usize> {
        self.edges[v][i].map(|t| t as usize)
    }

    pub fn position(&self, e: &Elem) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// A geodesic word for vertex `v`: letters multiply left-to-right.
    pub fn word_of(&self, v: usize) -> Vec<Letter> {
        let mut word = Vec::with_capacity(self.dist[v]);
        let mut at = v;
        while self.dist[at] > 0 {
            let mut stepped = false;
            for i in 0..self.labels() {
                // at = s_i·u means u = s_{pair(i)}·at.
                if let Some(u) = self.edge(at, self.pair(i)) {
                    if self.dist[u] + 1 == self.dist[at] {
                        word.push(i as Letter);
                        at = u;
                        stepped = true;
                        break;
                    }
                }
            }
            assert!(stepped, "every ball vertex has a geodesic predecessor");
        }
        word
    }
}
