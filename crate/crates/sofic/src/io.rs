//! Parsing and serialization for every artifact the tools exchange: group,
//! graph, witness, operator and action JSON; matrix-market-style triplet
//! text; one-line permutations; signed words; exact rationals; and the
//! study CSV.
//!
//! Conventions.  Serialized indices are 1-based everywhere (permutation
//! images, graph edge targets, vertex sets); the in-memory API is 0-based.
//! Words are space-separated signed generator indices — `"2 -1"` is the
//! second generator followed by the first generator's inverse; the empty
//! string is the identity.  Rationals are `"p/q"` strings (plain integers
//! and exact decimal strings such as `"0.15"` are also accepted).  Integers
//! inside JSON must fit signed 64 bits; larger values are written and read
//! as decimal strings, keeping every quantity exact.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::amenact::FiniteAction;
use crate::approx::{GraphMeta, LabeledGraph};
use crate::exactla::SparseIntMatrix;
use crate::groups::{Elem, GroupDescriptor, Letter, MarkedGroup};
use crate::l2::{Block, GroupRingMatrix, StudyTable};
use crate::permcalc::Perm;
use crate::witness::SoficWitness;
use crate::{Error, Rat, Result};

// ---------------------------------------------------------------------------
// small JSON access helpers (all errors carry the field path)

fn obj<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::Parse(format!("{what}: expected an object")))
}

fn field<'a>(m: &'a Map<String, Value>, key: &str, what: &str) -> Result<&'a Value> {
    m.get(key)
        .ok_or_else(|| Error::Parse(format!("{what}: missing field `{key}`")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| Error::Parse(format!("{what}: expected a nonnegative integer")))
}

fn as_i64(v: &Value, what: &str) -> Result<i64> {
    v.as_i64()
        .ok_or_else(|| Error::Parse(format!("{what}: expected an integer")))
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| Error::Parse(format!("{what}: expected a string")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a [Value]> {
    v.as_array()
        .map(Vec::as_slice)
        .ok_or_else(|| Error::Parse(format!("{what}: expected an array")))
}

// ---------------------------------------------------------------------------
// rationals and big integers

/// Parses `"p/q"`, a plain integer, or an exact decimal string (`"0.15"` is
/// exactly 3/20 — no float rounding is involved anywhere).
pub fn parse_rat(s: &str) -> Result<Rat> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    let int = |u: &str, what: &str| -> Result<BigInt> {
        u.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("`{u}` is not an {what}")))
    };
    if let Some((p, q)) = t.split_once('/') {
        let den = int(q, "integer denominator")?;
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        return Ok(Rat::new(int(p, "integer numerator")?, den));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let frac = frac.trim();
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("`{t}` is not an exact decimal")));
        }
        let negative = whole.trim().starts_with('-');
        let whole_part = match whole.trim() {
            "" | "-" | "+" => BigInt::zero(),
            w => int(w, "integer part")?,
        };
        let frac_part = int(frac, "decimal fraction")?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let magnitude = whole_part.magnitude() * scale.magnitude() + frac_part.magnitude();
        let num = if negative {
            -BigInt::from(magnitude)
        } else {
            BigInt::from(magnitude)
        };
        return Ok(Rat::new(num, scale));
    }
    Ok(Rat::from(int(t, "integer")?))
}

/// Renders a rational as `"p/q"` (`"p"` when the denominator is one).
pub fn rat_string(r: &Rat) -> String {
    r.to_string()
}

fn rat_from_value(v: &Value, what: &str) -> Result<Rat> {
    match v {
        Value::String(s) => parse_rat(s),
        Value::Number(_) => Ok(Rat::from(BigInt::from(as_i64(v, what)?))),
        _ => Err(Error::Parse(format!(
            "{what}: expected a rational string or integer"
        ))),
    }
}

fn bigint_value(b: &BigInt) -> Value {
    match b.to_i64() {
        Some(x) => json!(x),
        None => Value::String(b.to_string()),
    }
}

fn bigint_from_value(v: &Value, what: &str) -> Result<BigInt> {
    match v {
        Value::Number(_) => Ok(BigInt::from(as_i64(v, what)?)),
        Value::String(s) => s
            .trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("{what}: `{s}` is not an integer"))),
        _ => Err(Error::Parse(format!(
            "{what}: expected an integer or integer string"
        ))),
    }
}

// ---------------------------------------------------------------------------
// permutations: one-line image arrays, 1-based

/// Parses a one-line permutation, e.g. `"3 1 2"` sends 1 to 3.
pub fn parse_perm_line(s: &str) -> Result<Perm> {
    let mut images = Vec::new();
    for tok in s.split_whitespace() {
        let x: u64 = tok
            .parse()
            .map_err(|_| Error::Parse(format!("`{tok}` is not a positive integer")))?;
        if x == 0 {
            return Err(Error::Parse("permutation images are 1-based".into()));
        }
        let x = u32::try_from(x - 1)
            .map_err(|_| Error::Parse(format!("image {x} is out of range")))?;
        images.push(x);
    }
    Perm::from_images(images)
}

/// One-line rendering of a permutation (1-based images).
pub fn perm_line(p: &Perm) -> String {
    (0..p.degree())
        .map(|x| (p.apply(x) + 1).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn perm_value(p: &Perm) -> Value {
    Value::Array(
        (0..p.degree())
            .map(|x| json!(p.apply(x) + 1))
            .collect(),
    )
}

fn perm_from_value(v: &Value, what: &str) -> Result<Perm> {
    let arr = as_array(v, what)?;
    let mut images = Vec::with_capacity(arr.len());
    for item in arr {
        let x = as_usize(item, what)?;
        if x == 0 {
            return Err(Error::Parse(format!("{what}: images are 1-based")));
        }
        images.push((x - 1) as u32);
    }
    Perm::from_images(images)
}

// ---------------------------------------------------------------------------
// words: signed 1-based generator indices

/// Parses a word over the group's generators: token `i > 0` is generator
/// `i`, `-i` its inverse; tokens are whitespace-separated and the empty
/// string is the identity.
pub fn parse_word(s: &str, group: &MarkedGroup) -> Result<Vec<Letter>> {
    let half = group.generator_count() / 2;
    let mut word = Vec::new();
    for tok in s.split_whitespace() {
        let x: i64 = tok
            .parse()
            .map_err(|_| Error::Parse(format!("`{tok}` is not a signed generator index")))?;
        if x == 0 || x.unsigned_abs() as usize > half {
            return Err(Error::Parse(format!(
                "generator index {x} out of range (the group has {half} generators)"
            )));
        }
        let base = (x.unsigned_abs() - 1) as usize;
        let letter = if x > 0 { base } else { base + half };
        word.push(letter as Letter);
    }
    Ok(word)
}

/// Renders a word as signed 1-based generator indices.
pub fn word_string(word: &[Letter], generator_count: usize) -> String {
    let half = generator_count / 2;
    word.iter()
        .map(|&l| {
            let l = l as usize;
            if l < half {
                (l + 1).to_string()
            } else {
                format!("-{}", l - half + 1)
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Canonical word string of a group element.
pub fn elem_string(group: &MarkedGroup, e: &Elem) -> Result<String> {
    Ok(word_string(&group.word_for(e)?, group.generator_count()))
}

/// Parses a word string and reduces it to a group element.
pub fn parse_elem(s: &str, group: &MarkedGroup) -> Result<Elem> {
    group.word_reduce(&parse_word(s, group)?)
}

// ---------------------------------------------------------------------------
// group JSON

/// Serializes a marking as `{family, parameters, pairing}`.
pub fn group_json(g: &MarkedGroup) -> Value {
    let m = g.generator_count();
    let pairing: Vec<usize> = (0..m).map(|i| g.pair(i) + 1).collect();
    let mut map = Map::new();
    match g.descriptor() {
        GroupDescriptor::Lattice { d } => {
            map.insert("family".into(), json!("lattice"));
            map.insert("d".into(), json!(d));
        }
        GroupDescriptor::LatticeQuotient { moduli } => {
            map.insert("family".into(), json!("lattice_quotient"));
            map.insert("moduli".into(), json!(moduli));
        }
        GroupDescriptor::Free { rank } => {
            map.insert("family".into(), json!("free"));
            map.insert("rank".into(), json!(rank));
        }
        GroupDescriptor::PermGroup { gens } => {
            map.insert("family".into(), json!("perm_group"));
            map.insert(
                "gens".into(),
                Value::Array(gens.iter().map(perm_value).collect()),
            );
        }
    }
    map.insert("pairing".into(), json!(pairing));
    Value::Object(map)
}

fn group_from_value(v: &Value) -> Result<MarkedGroup> {
    let o = obj(v, "group")?;
    let family = as_str(field(o, "family", "group")?, "group.family")?;
    let group = match family {
        "lattice" => {
            let d = as_usize(field(o, "d", "group")?, "group.d")?;
            MarkedGroup::lattice(d)?
        }
        "lattice_quotient" => {
            let arr = as_array(field(o, "moduli", "group")?, "group.moduli")?;
            let moduli = arr
                .iter()
                .map(|x| as_i64(x, "group.moduli"))
                .collect::<Result<Vec<i64>>>()?;
            MarkedGroup::lattice_quotient(moduli)?
        }
        "free" => {
            let rank = as_usize(field(o, "rank", "group")?, "group.rank")?;
            MarkedGroup::free(rank)?
        }
        "perm_group" => {
            let arr = as_array(field(o, "gens", "group")?, "group.gens")?;
            let gens = arr
                .iter()
                .map(|x| perm_from_value(x, "group.gens"))
                .collect::<Result<Vec<Perm>>>()?;
            MarkedGroup::perm_group(gens)?
        }
        other => {
            return Err(Error::Parse(format!("group: unknown family `{other}`")));
        }
    };
    if let Some(p) = o.get("pairing") {
        let arr = as_array(p, "group.pairing")?;
        let declared = arr
            .iter()
            .map(|x| as_usize(x, "group.pairing"))
            .collect::<Result<Vec<usize>>>()?;
        let actual: Vec<usize> = (0..group.generator_count())
            .map(|i| group.pair(i) + 1)
            .collect();
        if declared != actual {
            return Err(Error::Parse(
                "group.pairing: inverse labels must follow the generators".into(),
            ));
        }
    }
    Ok(group)
}

/// Reads a marking from `{family, parameters, pairing}` JSON.
pub fn parse_group_json(s: &str) -> Result<MarkedGroup> {
    let v: Value = serde_json::from_str(s)?;
    group_from_value(&v)
}

// ---------------------------------------------------------------------------
// labeled-graph JSON

/// Serializes a graph as `{n, labels: [{gen, map}], pairing, good_set,
/// good_radius, meta}` (targets 1-based, `null` where a label is undefined).
pub fn graph_json(g: &LabeledGraph) -> Value {
    let labels: Vec<Value> = (0..g.labels())
        .map(|i| {
            let map: Vec<Value> = g
                .label_map(i)
                .iter()
                .map(|t| match t {
                    Some(x) => json!(x + 1),
                    None => Value::Null,
                })
                .collect();
            json!({"gen": i + 1, "map": map})
        })
        .collect();
    json!({
        "n": g.vertex_count(),
        "labels": labels,
        "pairing": (0..g.labels()).map(|i| g.pair(i) + 1).collect::<Vec<_>>(),
        "good_set": g.good_set.iter().map(|&v| v + 1).collect::<Vec<_>>(),
        "good_radius": g.good_radius,
        "meta": {"source": g.meta.source, "seed": g.meta.seed},
    })
}

/// Reads a graph from `{n, labels: [{gen, map}], ...}` JSON.
pub fn parse_graph_json(s: &str) -> Result<LabeledGraph> {
    let v: Value = serde_json::from_str(s)?;
    let o = obj(&v, "graph")?;
    let n = as_usize(field(o, "n", "graph")?, "graph.n")?;
    let label_items = as_array(field(o, "labels", "graph")?, "graph.labels")?;
    let m = label_items.len();
    let mut labels: Vec<Option<Vec<Option<u32>>>> = vec![None; m];
    for item in label_items {
        let io = obj(item, "graph.labels[]")?;
        let gen = as_usize(field(io, "gen", "graph.labels[]")?, "graph.labels[].gen")?;
        if gen == 0 || gen > m {
            return Err(Error::Parse(format!(
                "graph.labels[].gen: {gen} out of range 1..={m}"
            )));
        }
        if labels[gen - 1].is_some() {
            return Err(Error::Parse(format!(
                "graph.labels[].gen: label {gen} appears twice"
            )));
        }
        let raw = as_array(field(io, "map", "graph.labels[]")?, "graph.labels[].map")?;
        let mut map = Vec::with_capacity(raw.len());
        for slot in raw {
            match slot {
                Value::Null => map.push(None),
                _ => {
                    let t = as_usize(slot, "graph.labels[].map")?;
                    if t == 0 {
                        return Err(Error::Parse(
                            "graph.labels[].map: targets are 1-based".into(),
                        ));
                    }
                    map.push(Some((t - 1) as u32));
                }
            }
        }
        labels[gen - 1] = Some(map);
    }
    let labels: Vec<Vec<Option<u32>>> = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.ok_or_else(|| Error::Parse(format!("graph.labels: label {} missing", i + 1))))
        .collect::<Result<_>>()?;
    let pairing = match o.get("pairing") {
        Some(p) => {
            let arr = as_array(p, "graph.pairing")?;
            let mut out = Vec::with_capacity(arr.len());
            for x in arr {
                let j = as_usize(x, "graph.pairing")?;
                if j == 0 {
                    return Err(Error::Parse("graph.pairing entries are 1-based".into()));
                }
                out.push(j - 1);
            }
            out
        }
        None => (0..m).map(|i| (i + m / 2) % m).collect(),
    };
    let meta = match o.get("meta") {
        Some(mv) => {
            let mo = obj(mv, "graph.meta")?;
            GraphMeta {
                source: mo
                    .get("source")
                    .and_then(Value::as_str)
                    .unwrap_or("json")
                    .to_string(),
                seed: mo.get("seed").and_then(Value::as_u64),
            }
        }
        None => GraphMeta {
            source: "json".into(),
            seed: None,
        },
    };
    let mut graph = LabeledGraph::new(n, labels, pairing, meta)?;
    if let Some(gs) = o.get("good_set") {
        let mut set = Vec::new();
        for x in as_array(gs, "graph.good_set")? {
            let v = as_usize(x, "graph.good_set")?;
            if v == 0 || v > n {
                return Err(Error::Parse(format!(
                    "graph.good_set: vertex {v} out of range 1..={n}"
                )));
            }
            set.push(v - 1);
        }
        set.sort_unstable();
        set.dedup();
        graph.good_set = set;
    }
    if let Some(gr) = o.get("good_radius") {
        graph.good_radius = match gr {
            Value::Null => None,
            _ => Some(as_usize(gr, "graph.good_radius")?),
        };
    }
    Ok(graph)
}

// ---------------------------------------------------------------------------
// witness JSON

/// Serializes a witness as `{group, n, entries: [{word, perm}], f_list,
/// epsilon}`.
pub fn witness_json(w: &SoficWitness) -> Result<Value> {
    let group = &w.group;
    let mut entries = Vec::new();
    for (e, p) in w.entries() {
        entries.push(json!({
            "word": elem_string(group, e)?,
            "perm": perm_value(p),
        }));
    }
    let mut f_list = Vec::new();
    for e in w.check_set() {
        f_list.push(Value::String(elem_string(group, e)?));
    }
    Ok(json!({
        "group": group_json(group),
        "n": w.n,
        "entries": entries,
        "f_list": f_list,
        "epsilon": rat_string(&w.epsilon),
    }))
}

/// Reads a witness from `{group, n, entries, f_list?, epsilon}` JSON.
pub fn parse_witness_json(s: &str) -> Result<SoficWitness> {
    let v: Value = serde_json::from_str(s)?;
    let o = obj(&v, "witness")?;
    let group = group_from_value(field(o, "group", "witness")?)?;
    let n = as_usize(field(o, "n", "witness")?, "witness.n")?;
    let mut map = BTreeMap::new();
    for item in as_array(field(o, "entries", "witness")?, "witness.entries")? {
        let io = obj(item, "witness.entries[]")?;
        let word = as_str(field(io, "word", "witness.entries[]")?, "witness.entries[].word")?;
        let e = parse_elem(word, &group)?;
        let p = perm_from_value(
            field(io, "perm", "witness.entries[]")?,
            "witness.entries[].perm",
        )?;
        if map.insert(e, p).is_some() {
            return Err(Error::Parse(format!(
                "witness.entries: words `{word}` reduce to the same element twice"
            )));
        }
    }
    let f_list = match o.get("f_list") {
        Some(fv) => {
            let mut list = Vec::new();
            for x in as_array(fv, "witness.f_list")? {
                list.push(parse_elem(as_str(x, "witness.f_list")?, &group)?);
            }
            Some(list)
        }
        None => None,
    };
    let epsilon = rat_from_value(field(o, "epsilon", "witness")?, "witness.epsilon")?;
    SoficWitness::new(group, n, map, f_list, epsilon)
}

// ---------------------------------------------------------------------------
// operator (group-ring matrix) JSON

/// Serializes an operator as `{group, d, terms: [{word, block}]}`.
pub fn grm_json(a: &GroupRingMatrix) -> Result<Value> {
    let mut terms = Vec::new();
    for (e, b) in a.terms() {
        let block: Vec<Value> = b
            .iter()
            .map(|row| Value::Array(row.iter().map(bigint_value).collect()))
            .collect();
        terms.push(json!({
            "word": elem_string(a.group(), e)?,
            "block": block,
        }));
    }
    Ok(json!({
        "group": group_json(a.group()),
        "d": a.d(),
        "terms": terms,
    }))
}

/// Reads an operator from `{group, d, terms: [{word, block}]}` JSON; blocks
/// for repeated words are summed.
pub fn parse_grm_json(s: &str) -> Result<GroupRingMatrix> {
    let v: Value = serde_json::from_str(s)?;
    let o = obj(&v, "operator")?;
    let group = group_from_value(field(o, "group", "operator")?)?;
    let d = as_usize(field(o, "d", "operator")?, "operator.d")?;
    let mut terms: Vec<(Elem, Block)> = Vec::new();
    for item in as_array(field(o, "terms", "operator")?, "operator.terms")? {
        let io = obj(item, "operator.terms[]")?;
        let word = as_str(field(io, "word", "operator.terms[]")?, "operator.terms[].word")?;
        let e = parse_elem(word, &group)?;
        let rows = as_array(
            field(io, "block", "operator.terms[]")?,
            "operator.terms[].block",
        )?;
        let mut block = Vec::with_capacity(rows.len());
        for row in rows {
            let cells = as_array(row, "operator.terms[].block")?;
            let mut out = Vec::with_capacity(cells.len());
            for cell in cells {
                out.push(bigint_from_value(cell, "operator.terms[].block")?);
            }
            block.push(out);
        }
        terms.push((e, block));
    }
    GroupRingMatrix::new(group, d, terms)
}

// ---------------------------------------------------------------------------
// action JSON

/// Serializes an action as `{group, size, generators, composites?}`; the
/// `composites` array is present exactly for almost-actions and omits the
/// generator and identity entries (those are reconstructed on read).
pub fn action_json(a: &FiniteAction) -> Result<Value> {
    let group = a.group();
    let m = group.generator_count();
    let mut gens = Vec::with_capacity(m);
    for i in 0..m {
        gens.push(perm_value(&a.generator_perm(i)?));
    }
    let mut map = Map::new();
    map.insert("group".into(), group_json(group));
    map.insert("size".into(), json!(a.size()));
    map.insert("generators".into(), Value::Array(gens));
    if let Some(table) = a.composite_table() {
        let mut skip: BTreeSet<Elem> = BTreeSet::new();
        skip.insert(group.identity());
        for i in 0..m {
            skip.insert(group.word_reduce(&[i as Letter])?);
        }
        let mut comps = Vec::new();
        for (e, p) in table {
            if skip.contains(e) {
                continue;
            }
            comps.push(json!({
                "word": elem_string(group, e)?,
                "perm": perm_value(p),
            }));
        }
        map.insert("composites".into(), Value::Array(comps));
    }
    Ok(Value::Object(map))
}

/// Reads an action from `{group, size, generators, composites?}` JSON; a
/// present `composites` field (even an empty one) makes it an almost-action.
pub fn parse_action_json(s: &str) -> Result<FiniteAction> {
    let v: Value = serde_json::from_str(s)?;
    let o = obj(&v, "action")?;
    let group = group_from_value(field(o, "group", "action")?)?;
    let size = as_usize(field(o, "size", "action")?, "action.size")?;
    let mut gens = Vec::new();
    for item in as_array(field(o, "generators", "action")?, "action.generators")? {
        gens.push(perm_from_value(item, "action.generators")?);
    }
    if gens.iter().any(|p| p.degree() != size) {
        return Err(Error::Parse(format!(
            "action.generators: bijections must have degree equal to size {size}"
        )));
    }
    match o.get("composites") {
        None => FiniteAction::honest(group, gens),
        Some(cv) => {
            let mut composites = BTreeMap::new();
            for item in as_array(cv, "action.composites")? {
                let io = obj(item, "action.composites[]")?;
                let word = as_str(
                    field(io, "word", "action.composites[]")?,
                    "action.composites[].word",
                )?;
                let e = parse_elem(word, &group)?;
                let p = perm_from_value(
                    field(io, "perm", "action.composites[]")?,
                    "action.composites[].perm",
                )?;
                if composites.insert(e, p).is_some() {
                    return Err(Error::Parse(format!(
                        "action.composites: words `{word}` reduce to the same element twice"
                    )));
                }
            }
            FiniteAction::almost(group, gens, composites)
        }
    }
}

// ---------------------------------------------------------------------------
// triplet text for integer matrices

/// Parses matrix-market-style triplet text: comment lines start with `%` or
/// `#`; the first data line is `rows cols nnz`, then one `row col value`
/// triple per line (1-based indices, exact integer values).
pub fn parse_matrix_triplet(s: &str) -> Result<SparseIntMatrix> {
    let mut data = s.lines().enumerate().filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%') && !t.starts_with('#')
    });
    let (line_no, header) = data
        .next()
        .ok_or_else(|| Error::Parse("triplet text has no header line".into()))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 3 {
        return Err(Error::Parse(format!(
            "line {}: header must be `rows cols nnz`",
            line_no + 1
        )));
    }
    let dim = |tok: &str, what: &str| -> Result<usize> {
        tok.parse::<usize>()
            .map_err(|_| Error::Parse(format!("line {}: bad {what} `{tok}`", line_no + 1)))
    };
    let rows = dim(head[0], "row count")?;
    let cols = dim(head[1], "column count")?;
    let nnz = dim(head[2], "entry count")?;
    let mut triplets = Vec::with_capacity(nnz);
    for (line_no, line) in data {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::Parse(format!(
                "line {}: expected `row col value`",
                line_no + 1
            )));
        }
        let idx = |tok: &str, what: &str| -> Result<usize> {
            let x: usize = tok.parse().map_err(|_| {
                Error::Parse(format!("line {}: bad {what} `{tok}`", line_no + 1))
            })?;
            if x == 0 {
                return Err(Error::Parse(format!(
                    "line {}: indices are 1-based",
                    line_no + 1
                )));
            }
            Ok(x - 1)
        };
        let r = idx(toks[0], "row index")?;
        let c = idx(toks[1], "column index")?;
        let v: BigInt = toks[2].parse().map_err(|_| {
            Error::Parse(format!("line {}: bad value `{}`", line_no + 1, toks[2]))
        })?;
        triplets.push((r, c, v));
    }
    if triplets.len() != nnz {
        return Err(Error::Parse(format!(
            "header promises {nnz} entries, found {}",
            triplets.len()
        )));
    }
    SparseIntMatrix::from_triplets(rows, cols, triplets)
}

/// Renders a matrix as triplet text (row-major, 1-based, duplicates-free).
pub fn matrix_triplet(m: &SparseIntMatrix) -> String {
    let mut out = format!("{} {} {}\n", m.rows(), m.cols(), m.nnz());
    for (r, c, v) in m.iter() {
        out.push_str(&format!("{} {} {}\n", r + 1, c + 1, v));
    }
    out
}

// ---------------------------------------------------------------------------
// study CSV

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn rat_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Renders a convergence study as CSV.  The leading columns are
/// `m,good_frac,kdim_num,kdim_den,lndet`; exact rationals appear as separate
/// numerator/denominator columns alongside their float renderings, so the
/// exact path reproduces byte-identically.
pub fn study_csv(t: &StudyTable) -> String {
    let mut header = String::from("m,good_frac,kdim_num,kdim_den,lndet,detstar,exact,good_num,good_den");
    for i in 1..=t.lambdas.len() {
        header.push_str(&format!(",density{i}_num,density{i}_den"));
    }
    header.push_str(",error");
    let mut out = header;
    out.push('\n');
    for row in &t.rows {
        let mut cells: Vec<String> = Vec::new();
        cells.push(row.size.to_string());
        cells.push(rat_f64(&row.good_fraction).to_string());
        match &row.kernel_dim {
            Some(k) => {
                cells.push(k.numer().to_string());
                cells.push(k.denom().to_string());
            }
            None => {
                cells.push(String::new());
                cells.push(String::new());
            }
        }
        cells.push(row.log_det_star.map(|x| x.to_string()).unwrap_or_default());
        cells.push(
            row.det_star
                .as_ref()
                .map(|d| d.to_string())
                .unwrap_or_default(),
        );
        cells.push(row.exact.to_string());
        cells.push(row.good_fraction.numer().to_string());
        cells.push(row.good_fraction.denom().to_string());
        for i in 0..t.lambdas.len() {
            match row.densities.get(i) {
                Some(d) => {
                    cells.push(d.numer().to_string());
                    cells.push(d.denom().to_string());
                }
                None => {
                    cells.push(String::new());
                    cells.push(String::new());
                }
            }
        }
        cells.push(csv_cell(row.error.as_deref().unwrap_or("")));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
