//! Finite labeled graphs approximating a marked group.
//!
//! A `LabeledGraph` carries one partial bijection per generator label; paired
//! labels must be mutual inverses as partial maps. Vertices whose r-ball is
//! labeled-isomorphic to the group's Cayley ball form the *good set*: a
//! sequence of graphs approximates the group when good fractions tend to 1
//! for every fixed radius.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::groups::{BallGraph, Letter, MarkedGroup};
use crate::permcalc::Perm;
use crate::{Error, Result};

/// Cap on vertex counts for constructed graphs.
pub const VERTEX_CAP: u64 = 10_000_000;

/// Provenance carried by every graph artifact.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Finite graph with edges labeled by generator indices.
///
/// `labels[i][v] = Some(w)` is the edge `v →ᵢ w`; each label is a partial
/// bijection and label `pairing[i]` is its inverse map.
#[derive(Clone, Debug)]
pub struct LabeledGraph {
    n: usize,
    labels: Vec<Vec<Option<u32>>>,
    pairing: Vec<usize>,
    /// Cached good set (sorted), valid for `good_radius`.
    pub good_set: Vec<usize>,
    pub good_radius: Option<usize>,
    pub meta: GraphMeta,
}

impl LabeledGraph {
    /// Validating constructor used by every builder and by the JSON reader.
    pub fn new(
        n: usize,
        labels: Vec<Vec<Option<u32>>>,
        pairing: Vec<usize>,
        meta: GraphMeta,
    ) -> Result<LabeledGraph> {
        if n == 0 {
            return Err(Error::BadArgument("graph needs at least one vertex".into()));
        }
        let m = labels.len();
        if m == 0 {
            return Err(Error::BadArgument("graph needs at least one label".into()));
        }
        if pairing.len() != m {
            return Err(Error::Involution(format!(
                "pairing length {} for {} labels",
                pairing.len(),
                m
            )));
        }
        for i in 0..m {
            let j = pairing[i];
            if j >= m || pairing[j] != i {
                return Err(Error::Involution(format!(
                    "pairing is not an involution at label {}",
                    i + 1
                )));
            }
        }
        for (i, map) in labels.iter().enumerate() {
            if map.len() != n {
                return Err(Error::Dimension(format!(
                    "label {} map has length {}, expected {}",
                    i + 1,
                    map.len(),
                    n
                )));
            }
            let mut indeg = vec![false; n];
            for &t in map.iter().flatten() {
                let t = t as usize;
                if t >= n {
                    return Err(Error::Parse(format!(
                        "label {} target {} out of range",
                        i + 1,
                        t + 1
                    )));
                }
                if indeg[t] {
                    return Err(Error::InvalidPermutation(format!(
                        "label {} is not injective at target {}",
                        i + 1,
                        t + 1
                    )));
                }
                indeg[t] = true;
            }
        }
        // Paired labels are mutual inverses as partial maps.
        for i in 0..m {
            let j = pairing[i];
            for v in 0..n {
                if let Some(w) = labels[i][v] {
                    if labels[j][w as usize] != Some(v as u32) {
                        return Err(Error::Involution(format!(
                            "labels {} and {} are not mutual inverses at vertex {}",
                            i + 1,
                            j + 1,
                            v + 1
                        )));
                    }
                }
            }
        }
        Ok(LabeledGraph {
            n,
            labels,
            pairing,
            good_set: Vec::new(),
            good_radius: None,
            meta,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> usize {
        self.labels.len()
    }

    pub fn pair(&self, i: usize) -> usize {
        self.pairing[i]
    }

    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    /// Target of the label-`i` edge out of `v`, if present.
    pub fn apply(&self, i: usize, v: usize) -> Option<usize> {
        self.labels[i][v].map(|t| t as usize)
    }

    pub fn label_map(&self, i: usize) -> &[Option<u32>] {
        &self.labels[i]
    }

    /// Follows a word (letters act leftmost-outermost, so the rightmost
    /// letter is applied first); `None` as soon as an edge is missing.
    pub fn apply_word(&self, word: &[Letter], v: usize) -> Option<usize> {
        let mut at = v;
        for &i in word.iter().rev() {
            at = self.apply(i as usize, at)?;
        }
        Some(at)
    }

    /// Vertices within graph distance `r` of `v` (following edges of every
    /// label), in BFS order.
    pub fn ball_of(&self, v: usize, r: usize) -> Vec<usize> {
        let mut order = Vec::new();
        self.ball_with_dist(v, r, &mut order);
        order
    }

    fn ball_with_dist(&self, v: usize, r: usize, order: &mut Vec<usize>) -> HashMap<usize, usize> {
        let mut dist = HashMap::new();
        dist.insert(v, 0usize);
        order.push(v);
        let mut head = 0;
        while head < order.len() {
            let x = order[head];
            let dx = dist[&x];
            head += 1;
            if dx == r {
                continue;
            }
            for i in 0..self.labels() {
                if let Some(y) = self.apply(i, x) {
                    dist.entry(y).or_insert_with(|| {
                        order.push(y);
                        dx + 1
                    });
                }
            }
        }
        dist
    }
}

/// Discrete torus (ℤ/n)ᵈ: the canonical approximation graph of ℤᵈ.
///
/// All `2d` labels are full shift permutations; every vertex is good for any
/// radius `< ⌊n/2⌋`, which is cached on the result.
pub fn torus_graph(d: usize, n: usize) -> Result<LabeledGraph> {
    if d == 0 {
        return Err(Error::BadArgument("torus dimension must be ≥ 1".into()));
    }
    if n < 3 {
        return Err(Error::BadArgument(
            "torus side must be ≥ 3 so each label and its inverse are distinct".into(),
        ));
    }
    let total = (n as u64)
        .checked_pow(d as u32)
        .filter(|&t| t <= VERTEX_CAP)
        .ok_or(Error::CapExceeded {
            what: "torus vertices",
            got: u64::MAX,
            cap: VERTEX_CAP,
        })? as usize;
    let mut labels = vec![vec![None; total]; 2 * d];
    let mut strides = vec![1usize; d];
    for i in 1..d {
        strides[i] = strides[i - 1] * n;
    }
    for v in 0..total {
        for (i, &stride) in strides.iter().enumerate() {
            let c = (v / stride) % n;
            let up = v - c * stride + ((c + 1) % n) * stride;
            let down = v - c * stride + ((c + n - 1) % n) * stride;
            labels[i][v] = Some(up as u32);
            labels[d + i][v] = Some(down as u32);
        }
    }
    let pairing = (0..2 * d).map(|i| (i + d) % (2 * d)).collect();
    let meta = GraphMeta { source: format!("torus(d={d}, n={n})"), seed: None };
    let mut g = LabeledGraph::new(total, labels, pairing, meta)?;
    g.good_set = (0..total).collect();
    g.good_radius = Some(n / 2 - 1);
    Ok(g)
}

/// Schreier graph of per-label permutations: vertex set `{1..n}`, label `i`
/// acting by `hom[i]`. Paired labels must be handed in as exact inverses.
pub fn quotient_graph(group: &MarkedGroup, hom: &[Perm]) -> Result<LabeledGraph> {
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
    let labels = hom
        .iter()
        .map(|p| (0..n).map(|v| Some(p.apply(v) as u32)).collect())
        .collect();
    let pairing = (0..m).map(|i| group.pair(i)).collect();
    let meta = GraphMeta { source: format!("schreier({})", group.name()), seed: None };
    LabeledGraph::new(n, labels, pairing, meta)
}

/// Random approximation of the free group F_k: `k` independent uniform
/// permutations of `{1..n}` plus their inverses. Deterministic in `seed`.
pub fn random_free_graph(k: usize, n: usize, seed: u64) -> Result<LabeledGraph> {
    if k == 0 {
        return Err(Error::BadArgument("free rank must be ≥ 1".into()));
    }
    if n < 2 {
        return Err(Error::BadArgument("need at least two vertices".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens: Vec<Perm> = (0..k).map(|_| Perm::random(n, &mut rng)).collect();
    let mut labels: Vec<Vec<Option<u32>>> = Vec::with_capacity(2 * k);
    for g in &gens {
        labels.push((0..n).map(|v| Some(g.apply(v) as u32)).collect());
    }
    for g in &gens {
        let inv = g.inverse();
        labels.push((0..n).map(|v| Some(inv.apply(v) as u32)).collect());
    }
    let pairing = (0..2 * k).map(|i| (i + k) % (2 * k)).collect();
    let meta = GraphMeta { source: format!("random_free(k={k}, n={n})"), seed: Some(seed) };
    LabeledGraph::new(n, labels, pairing, meta)
}

/// Truncation of the group's Cayley ball of radius `r` to a labeled graph.
///
/// Label maps are partial at the boundary (edges leaving the ball are
/// absent), which is exactly the shape needed for paradoxicality
/// experiments on truncated infinite groups.  Vertices appear in BFS order,
/// so the first `|B(r')|` vertices are the sub-ball of radius `r' ≤ r`.
pub fn ball_graph(group: &MarkedGroup, r: usize) -> Result<LabeledGraph> {
    let ball = group.ball(r);
    let n = ball.len();
    let m = group.generator_count();
    let mut labels = vec![vec![None; n]; m];
    for v in 0..n {
        for (i, lab) in labels.iter_mut().enumerate() {
            lab[v] = ball.edge(v, i).map(|t| t as u32);
        }
    }
    let pairing = (0..m).map(|i| group.pair(i)).collect();
    let meta = GraphMeta { source: format!("ball({}, r={r})", group.name()), seed: None };
    LabeledGraph::new(n, labels, pairing, meta)
}

/// True iff the r-ball around `v` is labeled-isomorphic to the group's
/// Cayley ball of radius `r` via the unique label-respecting map sending
/// `v ↦ identity`.
pub fn ball_isomorphic(
    graph: &LabeledGraph,
    v: usize,
    group: &MarkedGroup,
    r: usize,
) -> bool {
    ball_isomorphic_at(graph, v, &group.ball(r))
}

/// Ball-isomorphism check against a precomputed Cayley ball (shared by
/// `good_set`, which probes every vertex against one ball).
pub fn ball_isomorphic_at(graph: &LabeledGraph, v: usize, ball: &BallGraph) -> bool {
    let m = graph.labels();
    assert_eq!(m, ball.labels(), "graph and group use different label alphabets");
    // Radius 0 compares bare vertices; edges (loops included) only enter at
    // radius ≥ 1.
    if ball.radius == 0 {
        return true;
    }
    let nv = ball.len();

    // Phase 1: propagate the label-respecting map φ across the Cayley ball in
    // BFS order; any missing edge or inconsistency kills the isomorphism.
    let mut phi: Vec<Option<usize>> = vec![None; nv];
    let mut hit: HashMap<usize, usize> = HashMap::new();
    phi[0] = Some(v);
    hit.insert(v, 0);
    for x in 0..nv {
        let gx = phi[x].expect("BFS order assigns every vertex before it is expanded");
        for i in 0..m {
            let Some(y) = ball.edge(x, i) else { continue };
            let Some(gy) = graph.apply(i, gx) else { return false };
            match phi[y] {
                None => {
                    if hit.insert(gy, y).is_some() {
                        return false; // not injective
                    }
                    phi[y] = Some(gy);
                }
                Some(prev) if prev != gy => return false,
                Some(_) => {}
            }
        }
    }

    // Phase 2: the graph-side ball must have exactly the same size; together
    // with injectivity this makes φ a bijection onto it.
    let mut order = Vec::new();
    let gdist = graph.ball_with_dist(v, ball.radius, &mut order);
    if gdist.len() != nv {
        return false;
    }

    // Phase 3: no extra edges — wherever the Cayley ball has no i-edge, the
    // graph must not connect two ball vertices with label i.
    for x in 0..nv {
        let gx = phi[x].expect("assigned in phase 1");
        for i in 0..m {
            if ball.edge(x, i).is_none() {
                if let Some(w) = graph.apply(i, gx) {
                    if gdist.contains_key(&w) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Computes the good set at radius `r` without touching the cache.
pub fn compute_good_set(graph: &LabeledGraph, group: &MarkedGroup, r: usize) -> Vec<usize> {
    let ball = group.ball(r);
    (0..graph.vertex_count())
        .filter(|&v| ball_isomorphic_at(graph, v, &ball))
        .collect()
}

/// Computes the good set at radius `r` and stores it on the graph.
pub fn good_set(graph: &mut LabeledGraph, group: &MarkedGroup, r: usize) -> Vec<usize> {
    if graph.good_radius == Some(r) {
        return graph.good_set.clone();
    }
    let set = compute_good_set(graph, group, r);
    graph.good_set = set.clone();
    graph.good_radius = Some(r);
    set
}
