#![no_main]
use libfuzzer_sys::fuzz_target;

use listedit::BitVector;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(v) = s.parse::<BitVector>() {
        assert_eq!(v.to_string(), s);
        assert_eq!(v.len(), s.len());
    }
});
