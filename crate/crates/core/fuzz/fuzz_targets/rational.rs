#![no_main]
use libfuzzer_sys::fuzz_target;

use listedit::rational;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(r) = rational::parse(s) {
        assert_eq!(rational::parse(&rational::format(&r)).unwrap(), r);
        let _ = rational::floor_mul(&r, 1 << 20);
    }
});
