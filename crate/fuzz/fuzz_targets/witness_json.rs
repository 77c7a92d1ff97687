//! Fuzzes the witness reader: accepted inputs must reserialize to a fixed
//! point (words reduced, entries canonically ordered).

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(witness) = sofic::io::parse_witness_json(text) else { return };
    let written = sofic::io::witness_json(&witness)
        .expect("parsed witness must serialize")
        .to_string();
    let reread = sofic::io::parse_witness_json(&written)
        .expect("serialized witness must parse back");
    assert_eq!(
        written,
        sofic::io::witness_json(&reread).unwrap().to_string(),
        "witness serialization must be idempotent"
    );
});
