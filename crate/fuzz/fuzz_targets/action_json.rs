//! Fuzzes the action reader: accepted inputs must reserialize to a fixed
//! point for both honest actions and almost-actions with composite tables.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(action) = sofic::io::parse_action_json(text) else { return };
    let written = sofic::io::action_json(&action)
        .expect("parsed action must serialize")
        .to_string();
    let reread = sofic::io::parse_action_json(&written)
        .expect("serialized action must parse back");
    assert_eq!(
        written,
        sofic::io::action_json(&reread).unwrap().to_string(),
        "action serialization must be idempotent"
    );
});
