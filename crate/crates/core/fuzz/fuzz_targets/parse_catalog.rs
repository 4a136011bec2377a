#![no_main]

use libfuzzer_sys::fuzz_target;
use ramsey_core::fraisse::catalog::Catalog;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let mut cat = Catalog::new();
    let _ = cat.load_str(text);
});
