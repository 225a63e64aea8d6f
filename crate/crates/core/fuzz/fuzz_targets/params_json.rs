#![no_main]
use libfuzzer_sys::fuzz_target;

use listedit::codec::ConcatParams;
use listedit::outer_code::{OuterCode, OuterCodeSpec};
use listedit::sync::SyncParams;

fuzz_target!(|data: &[u8]| {
    if let Ok(p) = serde_json::from_slice::<ConcatParams>(data) {
        let _ = p.validate();
    }
    if let Ok(p) = serde_json::from_slice::<SyncParams>(data) {
        let _ = p.validate();
    }
    if let Ok(spec) = serde_json::from_slice::<OuterCodeSpec>(data) {
        if spec.symbol_bits <= 16 && spec.block_count <= 1 << 12 {
            let _ = OuterCode::new(spec);
        }
    }
});
