//! Fuzzes the triplet-text reader: accepted inputs must reserialize to a
//! fixed point (entries sorted, duplicates rejected at parse time).

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(m) = sofic::io::parse_matrix_triplet(text) else { return };
    let written = sofic::io::matrix_triplet(&m);
    let reread = sofic::io::parse_matrix_triplet(&written)
        .expect("serialized matrix must parse back");
    assert_eq!(
        written,
        sofic::io::matrix_triplet(&reread),
        "triplet serialization must be idempotent"
    );
});
