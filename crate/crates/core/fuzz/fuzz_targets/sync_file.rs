#![no_main]
use libfuzzer_sys::fuzz_target;

use listedit::sync::SyncSequence;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(seq) = SyncSequence::from_json(s) {
        assert_eq!(SyncSequence::from_json(&seq.to_json()).unwrap(), seq);
    }
});
