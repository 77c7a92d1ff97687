//! Fuzzes the one-line permutation reader: accepted inputs must describe a
//! genuine bijection and round-trip exactly through the writer.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(p) = sofic::io::parse_perm_line(text) else { return };
    let q = sofic::io::parse_perm_line(&sofic::io::perm_line(&p))
        .expect("serialized permutation must parse back");
    assert_eq!(p, q, "permutation writer must round-trip");
    // the inverse must undo it pointwise — a cheap bijection certificate
    let inv = p.inverse();
    for x in 0..p.degree() {
        assert_eq!(inv.apply(p.apply(x)), x);
    }
});
