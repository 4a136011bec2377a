#![no_main]

use libfuzzer_sys::fuzz_target;
use ramsey_core::certificate::parse_certificate;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cert) = parse_certificate(text) {
        let again = cert.to_text();
        let back = parse_certificate(&again).expect("formatted certificate parses");
        assert_eq!(back.to_text(), again);
    }
});
