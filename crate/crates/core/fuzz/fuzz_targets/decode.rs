#![no_main]
use libfuzzer_sys::fuzz_target;

use listedit::codec::{ConcatCode, ConcatParams};
use listedit::outer_code::OuterCodeSpec;
use listedit::sync::SyncSequence;
use listedit::BitVector;

const SYNC: &str = include_str!("../../../../fixtures/desk/sync.json");
const OUTER: &str = include_str!("../../../../fixtures/desk/outer.json");

// Received strings for the desk code, one bit per input byte (low bit), at most 192 bits.
fuzz_target!(|data: &[u8]| {
    let sync = SyncSequence::from_json(SYNC).unwrap();
    let outer: OuterCodeSpec = serde_json::from_str(OUTER).unwrap();
    let code = ConcatCode::new(ConcatParams::desk_profile(), &sync, outer).unwrap();
    let bits: Vec<bool> = data.iter().take(192).map(|b| b & 1 == 1).collect();
    let _ = code.decode(&BitVector::from_bools(&bits));
});
