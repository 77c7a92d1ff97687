//! Fuzzes the marking reader: any input must either be rejected with an
//! error or parse to a group whose serialization is a fixed point.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(group) = sofic::io::parse_group_json(text) else { return };
    let written = sofic::io::group_json(&group).to_string();
    let reread = sofic::io::parse_group_json(&written)
        .expect("serialized group must parse back");
    assert_eq!(
        written,
        sofic::io::group_json(&reread).to_string(),
        "group serialization must be idempotent"
    );
});
