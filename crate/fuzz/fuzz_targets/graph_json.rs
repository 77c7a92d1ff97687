//! Fuzzes the labeled-graph reader: accepted inputs must reserialize to a
//! fixed point, and the parsed graph must satisfy the partial-bijection
//! invariants the constructor enforces.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(graph) = sofic::io::parse_graph_json(text) else { return };
    let written = sofic::io::graph_json(&graph).to_string();
    let reread = sofic::io::parse_graph_json(&written)
        .expect("serialized graph must parse back");
    assert_eq!(
        written,
        sofic::io::graph_json(&reread).to_string(),
        "graph serialization must be idempotent"
    );
});
