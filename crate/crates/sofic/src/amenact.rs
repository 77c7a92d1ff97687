//! Finite actions and almost-actions of marked groups.
//!
//! An *honest* action stores one bijection per label letter and evaluates
//! group elements by composing along words.  An *almost-action* instead
//! carries an explicit table of bijections keyed by reduced group element, so
//! the bijection assigned to a product `pq` may genuinely disagree with the
//! composition of the bijections assigned to `p` and `q`.  This module
//! provides exact censuses of those disagreements ([`error_set`]) and of
//! fixed points ([`fixed_set`]), Følner-set search with independent
//! re-verification, a propagation check for how error and fixed-point sets
//! spread under translation, and paradoxical decompositions through
//! Hall-style (2,1)-matchings.
//!
//! Points are always `0..size`; subsets are sorted, duplicate-free index
//! vectors.  All counting is exact (ratios are rationals, never floats).

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::approx::LabeledGraph;
use crate::groups::{Elem, Letter, MarkedGroup};
use crate::permcalc::Perm;
use crate::witness::SoficWitness;
use crate::{rat, Error, Rat, Result};

fn ratio(num: usize, den: usize) -> Rat {
    rat(num as i64, den as i64)
}

#[derive(Clone, Debug)]
enum ActionKind {
    Honest { gens: Vec<Perm> },
    Almost { table: BTreeMap<Elem, Perm> },
}

/// A marked group acting on a finite point set by bijections.
#[derive(Clone, Debug)]
pub struct FiniteAction {
    group: MarkedGroup,
    size: usize,
    kind: ActionKind,
}

fn table_put(table: &mut BTreeMap<Elem, Perm>, size: usize, e: Elem, p: Perm) -> Result<()> {
    if p.degree() != size {
        return Err(Error::Dimension(format!(
            "bijection for {e} has degree {}, expected {size}",
            p.degree()
        )));
    }
    if let Some(old) = table.get(&e) {
        if *old != p {
            return Err(Error::BadArgument(format!(
                "conflicting bijections assigned to {e}"
            )));
        }
        return Ok(());
    }
    table.insert(e, p);
    Ok(())
}

impl FiniteAction {
    /// Honest action: one bijection per label letter, evaluated along words.
    ///
    /// Paired labels must carry mutually inverse bijections.  Beyond that the
    /// caller asserts that the bijections realise the marking; [`error_set`]
    /// re-checks that assertion pointwise rather than assuming it, so a
    /// relation-breaking assignment is observable, never hidden.
    pub fn honest(group: MarkedGroup, gens: Vec<Perm>) -> Result<FiniteAction> {
        let m = group.generator_count();
        if gens.len() != m {
            return Err(Error::Dimension(format!(
                "need {m} labelled bijections, got {}",
                gens.len()
            )));
        }
        if gens.is_empty() {
            return Err(Error::BadArgument(
                "action needs at least one labelled bijection".into(),
            ));
        }
        let size = gens[0].degree();
        if gens.iter().any(|p| p.degree() != size) {
            return Err(Error::Dimension(
                "labelled bijections have unequal degrees".into(),
            ));
        }
        for i in 0..m {
            if gens[group.pair(i)] != gens[i].inverse() {
                return Err(Error::Involution(format!(
                    "labels {} and {} do not act by mutually inverse bijections",
                    i + 1,
                    group.pair(i) + 1
                )));
            }
        }
        Ok(FiniteAction {
            group,
            size,
            kind: ActionKind::Honest { gens },
        })
    }

    /// Almost-action: generator bijections plus an explicit table of
    /// composites keyed by reduced group element.
    ///
    /// The generator layer is validated as in [`FiniteAction::honest`] and
    /// merged into the table; the identity is inserted automatically (and
    /// must act as the identity if supplied explicitly).  Conflicting
    /// assignments to one element are rejected.  Evaluation consults the
    /// table only — a composite that is absent is a [`Error::MissingEntry`],
    /// never silently recomposed from the generators.
    pub fn almost(
        group: MarkedGroup,
        gens: Vec<Perm>,
        composites: BTreeMap<Elem, Perm>,
    ) -> Result<FiniteAction> {
        let base = FiniteAction::honest(group, gens)?;
        let (group, size, gens) = match base.kind {
            ActionKind::Honest { gens } => (base.group, base.size, gens),
            ActionKind::Almost { .. } => unreachable!(),
        };
        let mut table = BTreeMap::new();
        for (i, p) in gens.iter().enumerate() {
            let e = group.word_reduce(&[i as Letter])?;
            table_put(&mut table, size, e, p.clone())?;
        }
        for (e, p) in composites {
            table_put(&mut table, size, e, p)?;
        }
        let id_elem = group.identity();
        match table.get(&id_elem) {
            Some(p) if !p.is_identity() => {
                return Err(Error::BadArgument(
                    "the identity element must act as the identity bijection".into(),
                ))
            }
            Some(_) => {}
            None => {
                table.insert(id_elem, Perm::identity(size));
            }
        }
        Ok(FiniteAction {
            group,
            size,
            kind: ActionKind::Almost { table },
        })
    }

    /// Views a sofic witness as an almost-action: the table is exactly the
    /// witness map (which already contains the identity).
    pub fn from_witness(w: &SoficWitness) -> FiniteAction {
        let mut table = BTreeMap::new();
        for (e, p) in w.entries() {
            table.insert(e.clone(), p.clone());
        }
        FiniteAction {
            group: w.group.clone(),
            size: w.n,
            kind: ActionKind::Almost { table },
        }
    }

    /// Reads an honest action off a fully labelled graph.  Every label must
    /// be a total bijection — partially labelled graphs (truncation
    /// boundaries) are rejected — and the pairing must match the group's.
    pub fn from_graph(group: &MarkedGroup, g: &LabeledGraph) -> Result<FiniteAction> {
        let m = group.generator_count();
        if g.labels() != m {
            return Err(Error::MarkingMismatch(format!(
                "graph has {} labels, group has {m}",
                g.labels()
            )));
        }
        for i in 0..m {
            if g.pair(i) != group.pair(i) {
                return Err(Error::MarkingMismatch(format!(
                    "label pairing differs at label {}",
                    i + 1
                )));
            }
        }
        let n = g.vertex_count();
        let mut gens = Vec::with_capacity(m);
        for i in 0..m {
            let mut images = Vec::with_capacity(n);
            for (v, img) in g.label_map(i).iter().enumerate() {
                match img {
                    Some(w) => images.push(*w),
                    None => {
                        return Err(Error::MissingEntry(format!(
                            "label {} is undefined at vertex {}",
                            i + 1,
                            v + 1
                        )))
                    }
                }
            }
            gens.push(Perm::from_images(images)?);
        }
        FiniteAction::honest(group.clone(), gens)
    }

    pub fn group(&self) -> &MarkedGroup {
        &self.group
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_almost(&self) -> bool {
        matches!(self.kind, ActionKind::Almost { .. })
    }

    /// The full composite table of an almost-action (`None` for honest
    /// actions, whose bijections live on the generators alone).
    pub fn composite_table(&self) -> Option<&BTreeMap<Elem, Perm>> {
        match &self.kind {
            ActionKind::Almost { table } => Some(table),
            ActionKind::Honest { .. } => None,
        }
    }

    /// Bijection assigned to one label letter.
    pub fn generator_perm(&self, i: usize) -> Result<Perm> {
        if i >= self.group.generator_count() {
            return Err(Error::BadGenerator(format!("label {} out of range", i + 1)));
        }
        match &self.kind {
            ActionKind::Honest { gens } => Ok(gens[i].clone()),
            ActionKind::Almost { .. } => {
                let e = self.group.word_reduce(&[i as Letter])?;
                self.eval_elem(&e)
            }
        }
    }

    /// Evaluates a word: honest actions compose letter bijections (rightmost
    /// letter acts first), almost-actions reduce the word and consult the
    /// table.
    pub fn eval(&self, word: &[Letter]) -> Result<Perm> {
        match &self.kind {
            ActionKind::Honest { gens } => {
                let mut acc = Perm::identity(self.size);
                for &l in word {
                    let l = l as usize;
                    if l >= gens.len() {
                        return Err(Error::BadGenerator(format!(
                            "letter {} out of range",
                            l + 1
                        )));
                    }
                    acc = acc.compose(&gens[l]);
                }
                Ok(acc)
            }
            ActionKind::Almost { .. } => {
                let e = self.group.word_reduce(word)?;
                self.eval_elem(&e)
            }
        }
    }

    /// Evaluates a reduced group element.
    pub fn eval_elem(&self, e: &Elem) -> Result<Perm> {
        match &self.kind {
            ActionKind::Honest { .. } => {
                let word = self.group.word_for(e)?;
                self.eval(&word)
            }
            ActionKind::Almost { table } => table
                .get(e)
                .cloned()
                .ok_or_else(|| Error::MissingEntry(format!("no bijection assigned to {e}"))),
        }
    }
}

/// Caches element evaluations for the set-census routines.
struct Evaluator<'a> {
    action: &'a FiniteAction,
    cache: BTreeMap<Elem, Perm>,
}

impl<'a> Evaluator<'a> {
    fn new(action: &'a FiniteAction) -> Evaluator<'a> {
        Evaluator {
            action,
            cache: BTreeMap::new(),
        }
    }

    fn perm(&mut self, e: &Elem) -> Result<&Perm> {
        if !self.cache.contains_key(e) {
            let p = self.action.eval_elem(e)?;
            self.cache.insert(e.clone(), p);
        }
        Ok(self.cache.get(e).expect("just inserted"))
    }
}

/// Exact census of `{x : φ(g)(x) = x}`.
pub fn fixed_set(a: &FiniteAction, g: &Elem) -> Result<Vec<usize>> {
    let p = a.eval_elem(g)?;
    Ok((0..a.size()).filter(|&x| p.apply(x) == x).collect())
}

/// Exact census of `B(p,q) = {x : φ(p)(φ(q)(x)) ≠ φ(pq)(x)}`.
///
/// The bijection for `pq` is always evaluated independently — for honest
/// actions too, whose error sets are empty exactly when the labelled
/// bijections respect the relations used in reducing `pq`; that emptiness is
/// observed here, not assumed.
pub fn error_set(a: &FiniteAction, p: &Elem, q: &Elem) -> Result<Vec<usize>> {
    let perm_p = a.eval_elem(p)?;
    let perm_q = a.eval_elem(q)?;
    let perm_pq = a.eval_elem(&a.group().mul(p, q))?;
    Ok((0..a.size())
        .filter(|&x| perm_p.apply(perm_q.apply(x)) != perm_pq.apply(x))
        .collect())
}

fn dedup_elems(k: &[Elem]) -> Vec<Elem> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for e in k {
        if seen.insert(e.clone()) {
            out.push(e.clone());
        }
    }
    out
}

/// Exact ratios of one candidate set `F`, all over the denominator `|F|`:
/// the worst translate boundary `|φ(g)F △ F|`, the worst error mass
/// `|B(p,q) ∩ F|`, and the worst fixed-point mass `|Fix(φ(g)) ∩ F|` over
/// nontrivial `g`.
#[derive(Clone, Debug)]
pub struct FolnerReport {
    pub set: Vec<usize>,
    pub boundary_ratio: Rat,
    pub error_ratio: Rat,
    pub fix_ratio: Rat,
    pub epsilon: Rat,
    pub pass: bool,
}

/// Re-verifies a candidate Følner set by independent exact counting: strict
/// `< ε` for the boundary `|φ(g)F △ F|/|F|` over `g ∈ K`, the error mass
/// `|B(p,q) ∩ F|/|F|` over `p, q ∈ K`, and the fixed-point mass
/// `|Fix(φ(g)) ∩ F|/|F|` over *nontrivial* `g ∈ K`.  (The identity fixes
/// every point, so with it included no set could ever qualify; dropping it is
/// the only reading under which the condition is satisfiable.)
pub fn verify_folner(
    a: &FiniteAction,
    k: &[Elem],
    f: &[usize],
    epsilon: &Rat,
) -> Result<FolnerReport> {
    if f.is_empty() {
        return Err(Error::BadArgument("candidate set is empty".into()));
    }
    let n = a.size();
    let mut set: Vec<usize> = f.to_vec();
    set.sort_unstable();
    set.dedup();
    if let Some(&worst) = set.last() {
        if worst >= n {
            return Err(Error::BadArgument(format!(
                "point {worst} outside the {n}-point set"
            )));
        }
    }
    let size = set.len();
    let mut member = vec![false; n];
    for &x in &set {
        member[x] = true;
    }

    let elems = dedup_elems(k);
    let identity = a.group().identity();
    let mut boundary = Rat::zero();
    let mut error = Rat::zero();
    let mut fix = Rat::zero();
    for g in &elems {
        let p = a.eval_elem(g)?;
        let out = set.iter().filter(|&&x| !member[p.apply(x)]).count();
        // φ(g) is a bijection, so |φ(g)F △ F| = 2·#{x ∈ F : φ(g)(x) ∉ F}.
        boundary = boundary.max(ratio(2 * out, size));
        if *g != identity {
            let hit = fixed_set(a, g)?.iter().filter(|&&x| member[x]).count();
            fix = fix.max(ratio(hit, size));
        }
    }
    for p in &elems {
        for q in &elems {
            let hit = error_set(a, p, q)?
                .iter()
                .filter(|&&x| member[x])
                .count();
            error = error.max(ratio(hit, size));
        }
    }
    let pass = boundary < *epsilon && error < *epsilon && fix < *epsilon;
    Ok(FolnerReport {
        set,
        boundary_ratio: boundary,
        error_ratio: error,
        fix_ratio: fix,
        epsilon: epsilon.clone(),
        pass,
    })
}

/// Result of a Følner search.
#[derive(Clone, Debug)]
pub enum FolnerOutcome {
    /// A set passing every family strictly below ε, re-verified.
    Found(FolnerReport),
    /// Budget exhausted; the best candidate seen, with its exact ratios.
    /// This is a search failure, not a proof that no Følner set exists.
    Exhausted(FolnerReport),
}

struct SearchContext {
    cap: usize,
    boundary: Vec<Perm>,
    masks: Vec<Vec<bool>>,
    adjacency: Vec<Perm>,
}

impl SearchContext {
    /// Worst numerator over all three families (the denominator `|F|` is
    /// common, so candidates compare by numerator alone).
    fn worst_numerator(&self, member: &[bool], set: &[usize]) -> usize {
        let mut worst = 0usize;
        for p in &self.boundary {
            let out = set.iter().filter(|&&x| !member[p.apply(x)]).count();
            worst = worst.max(2 * out);
        }
        for mask in &self.masks {
            let hit = set.iter().filter(|&&x| mask[x]).count();
            worst = worst.max(hit);
        }
        worst
    }
}

/// Heuristic Følner search: label-BFS balls around random roots (3 restarts
/// of up to 8 roots each), then greedy single-vertex add/remove moves by
/// worst-ratio descent.  Deterministic under `seed`; `budget` bounds the
/// number of candidates rated.
///
/// Candidates are capped at half the point count (but at least one point):
/// on a finite truncation the full point set is always invariant and says
/// nothing about the acting group, and half-size is the usual convention for
/// finite expansion constants.  Every success is re-verified through
/// [`verify_folner`] — an independent counting path — before being returned.
pub fn folner_search(
    a: &FiniteAction,
    k: &[Elem],
    epsilon: &Rat,
    seed: u64,
    budget: usize,
) -> Result<FolnerOutcome> {
    if *epsilon <= Rat::zero() {
        return Err(Error::BadArgument("epsilon must be positive".into()));
    }
    if budget == 0 {
        return Err(Error::BadArgument("budget must be positive".into()));
    }
    let n = a.size();
    if n == 0 {
        return Err(Error::BadArgument("action on an empty point set".into()));
    }
    let elems = dedup_elems(k);
    if elems.is_empty() {
        return Err(Error::BadArgument("the family K is empty".into()));
    }

    // Fast rating path: translate bijections for the boundary family, and
    // point masks for the error and fixed-point families (which do not
    // depend on the candidate).
    let identity = a.group().identity();
    let mut boundary = Vec::with_capacity(elems.len());
    for g in &elems {
        boundary.push(a.eval_elem(g)?);
    }
    let mut masks = Vec::new();
    for p in &elems {
        for q in &elems {
            let mut mask = vec![false; n];
            for x in error_set(a, p, q)? {
                mask[x] = true;
            }
            masks.push(mask);
        }
    }
    for (g, pg) in elems.iter().zip(&boundary) {
        if *g != identity {
            let mut mask = vec![false; n];
            for x in 0..n {
                if pg.apply(x) == x {
                    mask[x] = true;
                }
            }
            masks.push(mask);
        }
    }
    let m = a.group().generator_count();
    let mut adjacency = Vec::with_capacity(m);
    for i in 0..m {
        adjacency.push(a.generator_perm(i)?);
    }
    let ctx = SearchContext {
        cap: std::cmp::max(1, n / 2),
        boundary,
        masks,
        adjacency,
    };

    const RESTARTS: usize = 3;
    const ROOTS: usize = 8;
    const GREEDY_MOVES: usize = 200;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evals = 0usize;
    let mut best: Option<(Rat, Vec<usize>)> = None;

    'outer: for _ in 0..RESTARTS {
        let mut roots: Vec<usize> = (0..n).collect();
        roots.shuffle(&mut rng);
        roots.truncate(ROOTS);
        for &root in &roots {
            // Grow a label-BFS ball, rating every radius under the cap.
            let mut member = vec![false; n];
            let mut points = vec![root];
            member[root] = true;
            let mut frontier = vec![root];
            loop {
                if evals >= budget {
                    break 'outer;
                }
                evals += 1;
                let worst = ratio(ctx.worst_numerator(&member, &points), points.len());
                if best.as_ref().is_none_or(|(b, _)| worst < *b) {
                    best = Some((worst.clone(), points.clone()));
                }
                if worst < *epsilon {
                    let report = verify_folner(a, &elems, &points, epsilon)?;
                    if report.pass {
                        return Ok(FolnerOutcome::Found(report));
                    }
                }
                let mut grew = false;
                let mut next = Vec::new();
                for &v in &frontier {
                    for pm in &ctx.adjacency {
                        let w = pm.apply(v);
                        if !member[w] {
                            member[w] = true;
                            points.push(w);
                            next.push(w);
                            grew = true;
                        }
                    }
                }
                if !grew || points.len() > ctx.cap {
                    break;
                }
                frontier = next;
            }
        }

        // Greedy local moves from the best candidate so far.
        let Some((seed_rate, seed_points)) = best.clone() else {
            continue;
        };
        let mut current_rate = seed_rate;
        let mut points = seed_points;
        let mut member = vec![false; n];
        for &x in &points {
            member[x] = true;
        }
        for _ in 0..GREEDY_MOVES {
            if evals >= budget {
                break 'outer;
            }
            let remove = rng.gen_bool(0.5) && points.len() > 1;
            let (added, removed) = if remove {
                let idx = rng.gen_range(0..points.len());
                let v = points.swap_remove(idx);
                member[v] = false;
                (None, Some(v))
            } else {
                if points.len() >= ctx.cap {
                    continue;
                }
                let v = points[rng.gen_range(0..points.len())];
                let pm = &ctx.adjacency[rng.gen_range(0..ctx.adjacency.len())];
                let w = pm.apply(v);
                if member[w] {
                    continue;
                }
                member[w] = true;
                points.push(w);
                (Some(w), None)
            };
            evals += 1;
            let worst = ratio(ctx.worst_numerator(&member, &points), points.len());
            if worst < current_rate {
                current_rate = worst.clone();
                if best.as_ref().is_none_or(|(b, _)| worst < *b) {
                    best = Some((worst.clone(), points.clone()));
                }
                if worst < *epsilon {
                    let report = verify_folner(a, &elems, &points, epsilon)?;
                    if report.pass {
                        return Ok(FolnerOutcome::Found(report));
                    }
                }
            } else {
                if let Some(w) = added {
                    member[w] = false;
                    let idx = points.iter().rposition(|&x| x == w).expect("just added");
                    points.swap_remove(idx);
                }
                if let Some(v) = removed {
                    member[v] = true;
                    points.push(v);
                }
            }
        }
    }

    let (_, points) = best.ok_or_else(|| {
        Error::Infeasible("no candidate could be rated within the budget".into())
    })?;
    let report = verify_folner(a, &elems, &points, epsilon)?;
    if report.pass {
        Ok(FolnerOutcome::Found(report))
    } else {
        Ok(FolnerOutcome::Exhausted(report))
    }
}

/// Products of at most `r` elements of `k`; the empty product is included,
/// so the identity is always a member.
pub fn k_closure(group: &MarkedGroup, k: &[Elem], r: usize) -> Vec<Elem> {
    let mut total: BTreeSet<Elem> = BTreeSet::new();
    total.insert(group.identity());
    let mut cur: Vec<Elem> = vec![group.identity()];
    for _ in 0..r {
        let mut next = BTreeSet::new();
        for a in &cur {
            for b in k {
                next.insert(group.mul(a, b));
            }
        }
        cur = next.iter().cloned().collect();
        total.extend(next);
    }
    total.into_iter().collect()
}

fn mark_errors(
    ev: &mut Evaluator<'_>,
    group: &MarkedGroup,
    ps: &[Elem],
    qs: &[Elem],
    mask: &mut [bool],
) -> Result<()> {
    for p in ps {
        for q in qs {
            let pq = group.mul(p, q);
            let perm_p = ev.perm(p)?.clone();
            let perm_q = ev.perm(q)?.clone();
            let perm_pq = ev.perm(&pq)?;
            for (x, slot) in mask.iter_mut().enumerate() {
                if perm_p.apply(perm_q.apply(x)) != perm_pq.apply(x) {
                    *slot = true;
                }
            }
        }
    }
    Ok(())
}

fn mark_fixes(
    ev: &mut Evaluator<'_>,
    identity: &Elem,
    gs: &[Elem],
    mask: &mut [bool],
) -> Result<()> {
    for g in gs {
        if g == identity {
            continue;
        }
        let p = ev.perm(g)?;
        for (x, slot) in mask.iter_mut().enumerate() {
            if p.apply(x) == x {
                *slot = true;
            }
        }
    }
    Ok(())
}

/// Checks the translation law for error and fixed-point sets: every point of
///
/// ```text
/// ⋃_{g ∈ K^r} φ(g)⁻¹( ⋃_{s,t ∈ K} B(s,t)  ∪  ⋃_{u ∈ K, u ≠ 1} Fix(φ(u)) )
/// ```
///
/// must lie in
///
/// ```text
/// ⋃_{a,b ∈ K^{r+1}} B(a,b)  ∪  ⋃_{c ∈ K^{2r+1}, c ≠ 1} Fix(φ(c)).
/// ```
///
/// `K` must be symmetric (closed under inverses); the identity is adjoined
/// automatically.  Both fixed-point unions range over nontrivial elements
/// only: the identity fixes every point, so including it would make the
/// inclusion vacuously true, and dropping it is sound because a conjugate
/// `g⁻¹ u g` of a nontrivial `u` is again nontrivial.  Requires every
/// composite up to `K^{2r+2}` to be evaluable.
///
/// Returns `None` when the inclusion holds, and a counterexample point
/// otherwise.  On consistently built action data the inclusion always holds,
/// so a `Some` return is a bug sentinel for the action's tables.
pub fn propagation_check(a: &FiniteAction, k: &[Elem], r: usize) -> Result<Option<usize>> {
    let group = a.group().clone();
    let identity = group.identity();
    let base_set: BTreeSet<Elem> = k.iter().cloned().collect();
    for e in &base_set {
        if !base_set.contains(&group.inv(e)) && *e != identity {
            return Err(Error::BadArgument(format!(
                "the family K must be symmetric: {e} is present without its inverse"
            )));
        }
    }
    let mut base: Vec<Elem> = base_set.into_iter().collect();
    if !base.contains(&identity) {
        base.push(identity.clone());
        base.sort();
    }

    let n = a.size();
    let mut ev = Evaluator::new(a);

    // Core: error sets and nontrivial fixed-point sets over K itself.
    let mut core = vec![false; n];
    mark_errors(&mut ev, &group, &base, &base, &mut core)?;
    mark_fixes(&mut ev, &identity, &base, &mut core)?;

    // Left side: pull the core back along φ(g) for every g ∈ K^r.
    let k_r = k_closure(&group, &base, r);
    let mut lhs = vec![false; n];
    for g in &k_r {
        let p = ev.perm(g)?;
        for (x, slot) in lhs.iter_mut().enumerate() {
            if core[p.apply(x)] {
                *slot = true;
            }
        }
    }

    // Right side: error sets over K^{r+1} pairs and fixed-point sets over
    // nontrivial elements of K^{2r+1}.
    let k_r1 = k_closure(&group, &base, r + 1);
    let k_2r1 = k_closure(&group, &base, 2 * r + 1);
    let mut rhs = vec![false; n];
    mark_errors(&mut ev, &group, &k_r1, &k_r1, &mut rhs)?;
    mark_fixes(&mut ev, &identity, &k_2r1, &mut rhs)?;

    Ok((0..n).find(|&x| lhs[x] && !rhs[x]))
}

/// One piece of a paradoxical decomposition: on `points`, the first matching
/// translates by `s` and the second by `t` (with `s ≠ t`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParadoxPiece {
    pub s: Elem,
    pub t: Elem,
    pub points: Vec<usize>,
}

/// Result of a paradoxical-decomposition search.
#[derive(Clone, Debug)]
pub enum ParadoxOutcome {
    /// Two injections of the base set with jointly disjoint images, split
    /// into pieces by the pair of translating words that realises them.
    Certificate(Vec<ParadoxPiece>),
    /// Hall's (2,1)-condition fails: `violator` has fewer than twice its own
    /// size in neighbours.
    Failure {
        violator: Vec<usize>,
        neighbor_count: usize,
    },
}

/// Maximum matching on the doubled left side (both copies of a left vertex
/// share one neighbour list).  `Ok` returns each left vertex's two partners;
/// `Err` returns a König-style Hall-violating set of left indices together
/// with its exact neighbour count.
#[allow(clippy::type_complexity)]
fn two_one_matching(
    n_right: usize,
    adj: &[Vec<usize>],
) -> std::result::Result<Vec<(usize, usize)>, (Vec<usize>, usize)> {
    const NONE: usize = usize::MAX;
    let la = adj.len();
    let nl = 2 * la;
    let mut pair_l = vec![NONE; nl];
    let mut pair_r = vec![NONE; n_right];

    fn try_augment(
        u: usize,
        adj: &[Vec<usize>],
        dist: &mut [usize],
        pair_l: &mut [usize],
        pair_r: &mut [usize],
    ) -> bool {
        for idx in 0..adj[u / 2].len() {
            let y = adj[u / 2][idx];
            let v = pair_r[y];
            let ok = if v == usize::MAX {
                true
            } else if dist[v] == dist[u].wrapping_add(1) {
                try_augment(v, adj, dist, pair_l, pair_r)
            } else {
                false
            };
            if ok {
                pair_l[u] = y;
                pair_r[y] = u;
                return true;
            }
        }
        dist[u] = usize::MAX - 1;
        false
    }

    loop {
        // Hopcroft–Karp phase: BFS layering from the unmatched left vertices.
        let mut dist = vec![NONE; nl];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for u in 0..nl {
            if pair_l[u] == NONE {
                dist[u] = 0;
                queue.push_back(u);
            }
        }
        let mut reachable_free = false;
        while let Some(u) = queue.pop_front() {
            for &y in &adj[u / 2] {
                let v = pair_r[y];
                if v == NONE {
                    reachable_free = true;
                } else if dist[v] == NONE {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if !reachable_free {
            break;
        }
        let mut augmented = false;
        for u in 0..nl {
            if pair_l[u] == NONE && try_augment(u, adj, &mut dist, &mut pair_l, &mut pair_r) {
                augmented = true;
            }
        }
        if !augmented {
            break;
        }
    }

    if pair_l.iter().all(|&y| y != NONE) {
        return Ok((0..la).map(|i| (pair_l[2 * i], pair_l[2 * i + 1])).collect());
    }

    // König-style alternating reachability from the unmatched left vertices:
    // left → right along non-matching edges, right → left along matching
    // edges.  The reached left projection L then has exactly the reached
    // right vertices as neighbours, and their count is < 2|L|.
    let mut left_seen = vec![false; nl];
    let mut right_seen = vec![false; n_right];
    let mut stack: Vec<usize> = (0..nl).filter(|&u| pair_l[u] == NONE).collect();
    for &u in &stack {
        left_seen[u] = true;
    }
    while let Some(u) = stack.pop() {
        for &y in &adj[u / 2] {
            if pair_l[u] == y || right_seen[y] {
                continue;
            }
            right_seen[y] = true;
            let v = pair_r[y];
            debug_assert_ne!(v, NONE, "a free reachable right vertex would augment");
            if v != NONE && !left_seen[v] {
                left_seen[v] = true;
                stack.push(v);
            }
        }
    }
    let left: Vec<usize> = (0..la)
        .filter(|&i| left_seen[2 * i] || left_seen[2 * i + 1])
        .collect();
    let count = right_seen.iter().filter(|&&b| b).count();
    debug_assert!(count < 2 * left.len());
    Err((left, count))
}

fn paradox_core(
    eval: &mut dyn FnMut(&Elem, usize) -> Result<usize>,
    n_points: usize,
    a_set: &[usize],
    kp: &[Elem],
) -> Result<ParadoxOutcome> {
    let mut a_sorted: Vec<usize> = a_set.to_vec();
    a_sorted.sort_unstable();
    a_sorted.dedup();
    if let Some(&worst) = a_sorted.last() {
        if worst >= n_points {
            return Err(Error::BadArgument(format!(
                "point {worst} outside the {n_points}-point set"
            )));
        }
    }
    if a_sorted.is_empty() {
        return Ok(ParadoxOutcome::Certificate(Vec::new()));
    }

    // Neighbour lists with a first-witness word per target.
    let la = a_sorted.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); la];
    let mut witness: Vec<BTreeMap<usize, Elem>> = vec![BTreeMap::new(); la];
    for t in kp {
        for (i, &x) in a_sorted.iter().enumerate() {
            let y = eval(t, x)?;
            if y >= n_points {
                return Err(Error::BadArgument(format!(
                    "translate image {y} outside the {n_points}-point set"
                )));
            }
            if let std::collections::btree_map::Entry::Vacant(slot) = witness[i].entry(y) {
                slot.insert(t.clone());
                adj[i].push(y);
            }
        }
    }

    // If the base set itself violates Hall's (2,1)-condition, report it
    // directly — it is the canonical violating set.
    let mut all_neighbors: BTreeSet<usize> = BTreeSet::new();
    for nb in &adj {
        all_neighbors.extend(nb.iter().copied());
    }
    if all_neighbors.len() < 2 * la {
        return Ok(ParadoxOutcome::Failure {
            violator: a_sorted,
            neighbor_count: all_neighbors.len(),
        });
    }

    match two_one_matching(n_points, &adj) {
        Ok(pairs) => {
            let mut pieces: BTreeMap<(Elem, Elem), Vec<usize>> = BTreeMap::new();
            for (i, &(x1, x2)) in pairs.iter().enumerate() {
                let s = witness[i][&x1].clone();
                let t = witness[i][&x2].clone();
                debug_assert_ne!(s, t, "distinct targets need distinct words");
                pieces.entry((s, t)).or_default().push(a_sorted[i]);
            }
            Ok(ParadoxOutcome::Certificate(
                pieces
                    .into_iter()
                    .map(|((s, t), points)| ParadoxPiece { s, t, points })
                    .collect(),
            ))
        }
        Err((left, count)) => Ok(ParadoxOutcome::Failure {
            violator: left.into_iter().map(|i| a_sorted[i]).collect(),
            neighbor_count: count,
        }),
    }
}

/// Searches for a (2,1)-matching from `a_set` into the action's point set
/// along translates by words in `K^p` (products of at most `p` elements of
/// `k`, the identity included).
pub fn paradox_certificate(
    a: &FiniteAction,
    a_set: &[usize],
    k: &[Elem],
    p: usize,
) -> Result<ParadoxOutcome> {
    let kp = k_closure(a.group(), k, p);
    let mut ev = Evaluator::new(a);
    let mut eval = |t: &Elem, x: usize| -> Result<usize> { Ok(ev.perm(t)?.apply(x)) };
    paradox_core(&mut eval, a.size(), a_set, &kp)
}

/// Same search on a labelled graph, where translates follow edge labels and
/// may be undefined near a truncation boundary (an error: choose `a_set` so
/// that all `K^p`-translates stay inside the graph).
pub fn paradox_certificate_graph(
    g: &LabeledGraph,
    group: &MarkedGroup,
    a_set: &[usize],
    k: &[Elem],
    p: usize,
) -> Result<ParadoxOutcome> {
    if g.labels() != group.generator_count() {
        return Err(Error::MarkingMismatch(format!(
            "graph has {} labels, group has {}",
            g.labels(),
            group.generator_count()
        )));
    }
    let kp = k_closure(group, k, p);
    let mut words: BTreeMap<Elem, Vec<Letter>> = BTreeMap::new();
    for t in &kp {
        words.insert(t.clone(), group.word_for(t)?);
    }
    let mut eval = |t: &Elem, x: usize| -> Result<usize> {
        g.apply_word(&words[t], x).ok_or_else(|| {
            Error::MissingEntry(format!(
                "translate by {t} is undefined at vertex {}",
                x + 1
            ))
        })
    };
    paradox_core(&mut eval, g.vertex_count(), a_set, &kp)
}

fn verify_paradox_core(
    eval: &mut dyn FnMut(&Elem, usize) -> Result<usize>,
    a_set: &[usize],
    pieces: &[ParadoxPiece],
) -> Result<()> {
    let mut expected: Vec<usize> = a_set.to_vec();
    expected.sort_unstable();
    expected.dedup();

    let mut covered: Vec<usize> = Vec::new();
    for piece in pieces {
        if piece.s == piece.t {
            return Err(Error::Verification(
                "a piece translates by the same word on both sides".into(),
            ));
        }
        covered.extend(piece.points.iter().copied());
    }
    let total = covered.len();
    covered.sort_unstable();
    covered.dedup();
    if covered.len() != total {
        return Err(Error::Verification("pieces overlap".into()));
    }
    if covered != expected {
        return Err(Error::Verification(
            "pieces do not partition the base set".into(),
        ));
    }

    let mut images: BTreeSet<usize> = BTreeSet::new();
    for piece in pieces {
        for &x in &piece.points {
            for e in [&piece.s, &piece.t] {
                let y = eval(e, x)?;
                if !images.insert(y) {
                    return Err(Error::Verification(format!(
                        "translate images collide at point {y}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Re-verifies a certificate with fresh evaluations: the pieces must
/// partition the base set, and all `2|A|` translate images must be pairwise
/// distinct — which is simultaneously the disjointness of the two
/// injections' images and the pairwise disjointness of every piece's two
/// translates.
pub fn verify_paradox(a: &FiniteAction, a_set: &[usize], pieces: &[ParadoxPiece]) -> Result<()> {
    let mut ev = Evaluator::new(a);
    let mut eval = |t: &Elem, x: usize| -> Result<usize> { Ok(ev.perm(t)?.apply(x)) };
    verify_paradox_core(&mut eval, a_set, pieces)
}

/// Graph-evaluation variant of [`verify_paradox`].
pub fn verify_paradox_graph(
    g: &LabeledGraph,
    group: &MarkedGroup,
    a_set: &[usize],
    pieces: &[ParadoxPiece],
) -> Result<()> {
    let mut cache: BTreeMap<Elem, Vec<Letter>> = BTreeMap::new();
    let mut eval = |t: &Elem, x: usize| -> Result<usize> {
        if !cache.contains_key(t) {
            cache.insert(t.clone(), group.word_for(t)?);
        }
        g.apply_word(&cache[t], x).ok_or_else(|| {
            Error::MissingEntry(format!(
                "translate by {t} is undefined at vertex {}",
                x + 1
            ))
        })
    };
    verify_paradox_core(&mut eval, a_set, pieces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::{ball_graph, random_free_graph, torus_graph};
    use crate::witness::witness_from_quotient;

    fn cycle_perm(n: usize) -> Perm {
        Perm::from_images((0..n).map(|x| ((x + 1) % n) as u32).collect()).unwrap()
    }

    fn shift_action(n: usize) -> FiniteAction {
        let c = cycle_perm(n);
        let inv = c.inverse();
        FiniteAction::honest(MarkedGroup::lattice(1).unwrap(), vec![c, inv]).unwrap()
    }

    fn s_elem(group: &MarkedGroup, a: i64) -> Elem {
        let letter: Letter = if a >= 0 { 0 } else { 1 };
        let word = vec![letter; a.unsigned_abs() as usize];
        group.word_reduce(&word).unwrap()
    }

    /// Shift almost-action on ℤ/n viewed as a ℤ-action, with φ(s^a) stored
    /// for |a| ≤ radius and φ(s²) corrupted by the transposition (0 1).
    fn corrupted_shift(n: usize, radius: i64) -> FiniteAction {
        let group = MarkedGroup::lattice(1).unwrap();
        let c = cycle_perm(n);
        let mut composites = BTreeMap::new();
        for a in -radius..=radius {
            if a.abs() <= 1 {
                continue;
            }
            let mut p = Perm::identity(n);
            for _ in 0..a.unsigned_abs() {
                p = if a > 0 { p.compose(&c) } else { p.compose(&c.inverse()) };
            }
            if a == 2 {
                let mut images: Vec<u32> = (0..n).map(|x| p.apply(x) as u32).collect();
                images.swap(0, 1);
                p = Perm::from_images(images).unwrap();
            }
            composites.insert(s_elem(&group, a), p);
        }
        FiniteAction::almost(group, vec![c.clone(), c.inverse()], composites).unwrap()
    }

    #[test]
    fn honest_constructor_validates() {
        let group = MarkedGroup::lattice(1).unwrap();
        let c = cycle_perm(5);
        // paired labels must be mutually inverse
        let err = FiniteAction::honest(group.clone(), vec![c.clone(), c.clone()]);
        assert!(matches!(err, Err(Error::Involution(_))));
        // degrees must agree
        let err = FiniteAction::honest(group.clone(), vec![c.clone(), cycle_perm(4)]);
        assert!(matches!(err, Err(Error::Dimension(_))));
        // count must match the marking
        let err = FiniteAction::honest(group, vec![c.clone()]);
        assert!(matches!(err, Err(Error::Dimension(_))));
    }

    #[test]
    fn torus_action_commutes() {
        let group = MarkedGroup::lattice(2).unwrap();
        let g = torus_graph(2, 4).unwrap();
        let a = FiniteAction::from_graph(&group, &g).unwrap();
        assert_eq!(a.size(), 16);
        assert!(!a.is_almost());
        let xy = a.eval(&[0, 1]).unwrap();
        let yx = a.eval(&[1, 0]).unwrap();
        assert_eq!(xy, yx);
        let e = group.word_reduce(&[0, 1, 1]).unwrap();
        assert_eq!(a.eval_elem(&e).unwrap(), a.eval(&[1, 0, 1]).unwrap());
    }

    #[test]
    fn from_graph_rejects_partial_labels() {
        let f2 = MarkedGroup::free(2).unwrap();
        let g = ball_graph(&f2, 2).unwrap();
        let err = FiniteAction::from_graph(&f2, &g);
        assert!(matches!(err, Err(Error::MissingEntry(_))));
    }

    #[test]
    fn fixed_sets_census() {
        let a = shift_action(6);
        let group = a.group().clone();
        assert_eq!(fixed_set(&a, &group.identity()).unwrap().len(), 6);
        assert!(fixed_set(&a, &s_elem(&group, 1)).unwrap().is_empty());
        assert_eq!(fixed_set(&a, &s_elem(&group, 6)).unwrap().len(), 6);

        // One self-loop vertex: 0 is fixed, the rest cycle.
        let n = 5;
        let mut images: Vec<u32> = vec![0; n];
        for x in 1..n {
            images[x] = if x + 1 < n { (x + 1) as u32 } else { 1 };
        }
        let loop_perm = Perm::from_images(images).unwrap();
        let group = MarkedGroup::lattice(1).unwrap();
        let almost = FiniteAction::almost(
            group.clone(),
            vec![loop_perm.clone(), loop_perm.inverse()],
            BTreeMap::new(),
        )
        .unwrap();
        assert!(almost.is_almost());
        assert_eq!(fixed_set(&almost, &s_elem(&group, 1)).unwrap(), vec![0]);
    }

    #[test]
    fn error_sets_honest_are_empty() {
        let group = MarkedGroup::lattice(2).unwrap();
        let g = torus_graph(2, 3).unwrap();
        let a = FiniteAction::from_graph(&group, &g).unwrap();
        let x = group.word_reduce(&[0]).unwrap();
        let y = group.word_reduce(&[1]).unwrap();
        for p in [&x, &y] {
            for q in [&x, &y] {
                assert!(error_set(&a, p, q).unwrap().is_empty());
            }
        }
    }

    #[test]
    fn error_sets_from_witness_match_multiplicativity() {
        // An exact quotient ℤ → ℤ/6 gives empty error sets...
        let group = MarkedGroup::lattice(1).unwrap();
        let c = cycle_perm(6);
        let f_list: Vec<Elem> = (1..=2).map(|a| s_elem(&group, a)).collect();
        let w = witness_from_quotient(&group, &[c.clone(), c.inverse()], &f_list, rat(1, 10))
            .unwrap();
        let a = FiniteAction::from_witness(&w);
        assert!(a.is_almost());
        let s = s_elem(&group, 1);
        assert_eq!(a.eval_elem(&s_elem(&group, 2)).unwrap(), c.compose(&c));
        assert!(error_set(&a, &s, &s).unwrap().is_empty());

        // ...while corrupting φ(s²) by a transposition yields exactly the
        // two moved points: |B(s,s)| = n·(1 − multiplicativity ratio).
        let bad = corrupted_shift(6, 2);
        let b = error_set(&bad, &s, &s).unwrap();
        assert_eq!(b, vec![0, 1]);
        // missing composite is an error, not a recomposition
        let err = error_set(&bad, &s_elem(&group, 2), &s);
        assert!(matches!(err, Err(Error::MissingEntry(_))));
    }

    #[test]
    fn verify_folner_exact_interval_ratios() {
        let group = MarkedGroup::lattice_quotient(vec![12]).unwrap();
        let c = cycle_perm(12);
        let a = FiniteAction::honest(group.clone(), vec![c.clone(), c.inverse()]).unwrap();
        let k = vec![
            group.word_reduce(&[0]).unwrap(),
            group.word_reduce(&[1]).unwrap(),
        ];
        let f: Vec<usize> = (0..6).collect();
        let report = verify_folner(&a, &k, &f, &rat(1, 2)).unwrap();
        // each translate pushes exactly one point out: |φ(s)F △ F| = 2
        assert_eq!(report.boundary_ratio, rat(1, 3));
        assert_eq!(report.error_ratio, rat(0, 1));
        assert_eq!(report.fix_ratio, rat(0, 1));
        assert!(report.pass);
        let tight = verify_folner(&a, &k, &f, &rat(1, 3)).unwrap();
        assert!(!tight.pass, "the bound is strict");
    }

    #[test]
    fn folner_search_finds_torus_squares() {
        let group = MarkedGroup::lattice(2).unwrap();
        let g = torus_graph(2, 16).unwrap();
        let a = FiniteAction::from_graph(&group, &g).unwrap();
        let k: Vec<Elem> = (0..4)
            .map(|i| group.word_reduce(&[i as Letter]).unwrap())
            .collect();
        let eps = rat(1, 4);
        let out = folner_search(&a, &k, &eps, 7, 2000).unwrap();
        let FolnerOutcome::Found(report) = out else {
            panic!("search should succeed on the torus");
        };
        assert!(report.pass);
        assert!(report.boundary_ratio < eps);
        assert!(report.set.len() <= 128, "candidates are capped at n/2");

        // determinism under the seed
        let again = folner_search(&a, &k, &eps, 7, 2000).unwrap();
        let FolnerOutcome::Found(r2) = again else {
            panic!("deterministic rerun diverged");
        };
        assert_eq!(report.set, r2.set);
    }

    #[test]
    fn folner_search_single_point_action() {
        let group = MarkedGroup::lattice_quotient(vec![1]).unwrap();
        let id = Perm::identity(1);
        let a = FiniteAction::honest(group.clone(), vec![id.clone(), id]).unwrap();
        let k = vec![group.word_reduce(&[0]).unwrap()];
        let out = folner_search(&a, &k, &rat(1, 100), 0, 10).unwrap();
        let FolnerOutcome::Found(report) = out else {
            panic!("the one-point action has F = X");
        };
        assert_eq!(report.set, vec![0]);
        assert_eq!(report.boundary_ratio, rat(0, 1));
        assert_eq!(report.fix_ratio, rat(0, 1));
    }

    #[test]
    fn folner_search_reports_exhaustion() {
        let group = MarkedGroup::lattice(2).unwrap();
        let g = torus_graph(2, 8).unwrap();
        let a = FiniteAction::from_graph(&group, &g).unwrap();
        let k: Vec<Elem> = (0..4)
            .map(|i| group.word_reduce(&[i as Letter]).unwrap())
            .collect();
        let out = folner_search(&a, &k, &rat(1, 1000), 3, 25).unwrap();
        let FolnerOutcome::Exhausted(report) = out else {
            panic!("no 64-point torus set has boundary below 1/1000");
        };
        assert!(!report.pass);
        assert!(report.boundary_ratio > rat(1, 1000));
    }

    #[test]
    fn k_closure_is_balls_of_products() {
        let group = MarkedGroup::lattice(1).unwrap();
        let k = vec![s_elem(&group, 1), s_elem(&group, -1)];
        let closure = k_closure(&group, &k, 2);
        let expected: BTreeSet<Elem> = (-2..=2).map(|a| s_elem(&group, a)).collect();
        assert_eq!(closure.into_iter().collect::<BTreeSet<_>>(), expected);
    }

    #[test]
    fn propagation_holds_on_free_torus_action() {
        let group = MarkedGroup::lattice(2).unwrap();
        let g = torus_graph(2, 5).unwrap();
        let a = FiniteAction::from_graph(&group, &g).unwrap();
        let k: Vec<Elem> = (0..4)
            .map(|i| group.word_reduce(&[i as Letter]).unwrap())
            .collect();
        assert_eq!(propagation_check(&a, &k, 1).unwrap(), None);
    }

    #[test]
    fn propagation_holds_with_fixed_points() {
        // A reflection of 7 points fixes the midpoint; its conjugates keep
        // the fixed-point sets inside the right-hand union.
        let rho = Perm::from_images((0..7).rev().map(|x| x as u32).collect()).unwrap();
        let group = MarkedGroup::perm_group(vec![rho.clone()]).unwrap();
        let a = FiniteAction::honest(group.clone(), vec![rho.clone(), rho.inverse()]).unwrap();
        let k = vec![group.word_reduce(&[0]).unwrap()];
        assert_eq!(fixed_set(&a, &k[0]).unwrap(), vec![3]);
        assert_eq!(propagation_check(&a, &k, 1).unwrap(), None);
        assert_eq!(propagation_check(&a, &k, 2).unwrap(), None);
    }

    #[test]
    fn propagation_holds_on_corrupted_tables() {
        // Nonempty error sets: the inclusion is set algebra valid for any
        // identity-preserving table, corrupted ones included.
        let a = corrupted_shift(8, 4);
        let group = a.group().clone();
        let k = vec![s_elem(&group, 1), s_elem(&group, -1)];
        assert_eq!(propagation_check(&a, &k, 1).unwrap(), None);
    }

    #[test]
    fn propagation_requires_symmetry() {
        let a = shift_action(6);
        let group = a.group().clone();
        let k = vec![s_elem(&group, 1)];
        let err = propagation_check(&a, &k, 1);
        assert!(matches!(err, Err(Error::BadArgument(_))));
    }

    #[test]
    fn paradox_fails_on_cyclic_orbit() {
        let n = 12;
        let a = shift_action(n);
        let group = a.group().clone();
        let k = vec![s_elem(&group, 1), s_elem(&group, -1)];
        let all: Vec<usize> = (0..n).collect();
        let out = paradox_certificate(&a, &all, &k, 2).unwrap();
        let ParadoxOutcome::Failure {
            violator,
            neighbor_count,
        } = out
        else {
            panic!("a bijective orbit cannot satisfy Hall (2,1) with A = X");
        };
        assert_eq!(violator, all);
        assert_eq!(neighbor_count, n);
    }

    #[test]
    fn paradox_certificate_on_free_ball() {
        let f2 = MarkedGroup::free(2).unwrap();
        let g = ball_graph(&f2, 3).unwrap();
        assert_eq!(g.vertex_count(), 53);
        // vertices are in breadth-first order, so the radius-2 sub-ball is
        // exactly the first 17 of them
        let a_set: Vec<usize> = (0..17).collect();
        let k: Vec<Elem> = (0..4)
            .map(|i| f2.word_reduce(&[i as Letter]).unwrap())
            .collect();
        let out = paradox_certificate_graph(&g, &f2, &a_set, &k, 1).unwrap();
        let ParadoxOutcome::Certificate(pieces) = out else {
            panic!("the free ball expands by a factor ≥ 2");
        };
        let covered: usize = pieces.iter().map(|p| p.points.len()).sum();
        assert_eq!(covered, 17);
        verify_paradox_graph(&g, &f2, &a_set, &pieces).unwrap();

        // tampering is caught: duplicating a point breaks the partition
        let mut bad = pieces.clone();
        let first = bad[0].points[0];
        bad[0].points.push(first);
        let err = verify_paradox_graph(&g, &f2, &a_set, &bad);
        assert!(matches!(err, Err(Error::Verification(_))));
    }

    #[test]
    fn paradox_certificate_on_random_graph_action() {
        let f2 = MarkedGroup::free(2).unwrap();
        let g = random_free_graph(2, 60, 5).unwrap();
        let a = FiniteAction::from_graph(&f2, &g).unwrap();
        let k: Vec<Elem> = (0..4)
            .map(|i| f2.word_reduce(&[i as Letter]).unwrap())
            .collect();
        let a_set: Vec<usize> = (0..20).collect();
        let out = paradox_certificate(&a, &a_set, &k, 2).unwrap();
        let ParadoxOutcome::Certificate(pieces) = out else {
            panic!("random 4-regular graphs expand small sets");
        };
        verify_paradox(&a, &a_set, &pieces).unwrap();
        for piece in &pieces {
            assert_ne!(piece.s, piece.t);
        }
    }

    #[test]
    fn paradox_empty_base_set() {
        let a = shift_action(5);
        let group = a.group().clone();
        let k = vec![s_elem(&group, 1), s_elem(&group, -1)];
        let out = paradox_certificate(&a, &[], &k, 1).unwrap();
        let ParadoxOutcome::Certificate(pieces) = out else {
            panic!("empty base set is vacuously decomposable");
        };
        assert!(pieces.is_empty());
        verify_paradox(&a, &[], &pieces).unwrap();
    }
}
