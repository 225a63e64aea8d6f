#![no_main]
use libfuzzer_sys::fuzz_target;

use listedit::BitMatrix;

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = serde_json::from_slice::<BitMatrix>(data) {
        let again: BitMatrix = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(again, m);
        assert!(m.rank() <= m.row_count().min(m.col_count()));
    }
});
