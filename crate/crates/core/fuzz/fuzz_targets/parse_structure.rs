#![no_main]

use libfuzzer_sys::fuzz_target;
use ramsey_core::text::{format_structure, parse_structures};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(all) = parse_structures(text) {
        for s in all {
            let again = format_structure(&s.name, &s.structure);
            let back = ramsey_core::text::parse_structure(&again).expect("formatted structure parses");
            assert_eq!(back.structure, s.structure);
        }
    }
});
