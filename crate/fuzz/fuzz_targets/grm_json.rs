//! Fuzzes the operator reader: accepted inputs must reserialize to a fixed
//! point (duplicate words summed, zero blocks dropped, words reduced).

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(a) = sofic::io::parse_grm_json(text) else { return };
    let written = sofic::io::grm_json(&a)
        .expect("parsed operator must serialize")
        .to_string();
    let reread = sofic::io::parse_grm_json(&written)
        .expect("serialized operator must parse back");
    assert_eq!(
        written,
        sofic::io::grm_json(&reread).unwrap().to_string(),
        "operator serialization must be idempotent"
    );
});
