#![no_main]

use libfuzzer_sys::fuzz_target;
use ramsey_core::rational::{format_rational, parse_rational};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(x) = parse_rational(text) {
        assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
    }
});
