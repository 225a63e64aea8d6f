#![no_main]
use std::collections::BTreeSet;

use libfuzzer_sys::fuzz_target;

use listedit::outer_code::{OuterCode, OuterCodeSpec, OuterKind, RecoveryInput, RecoveryParams};
use listedit::Rational;

// Boxes for the desk outer code: byte 0 picks α, then one byte per candidate,
// high nibble = position, low nibble = symbol.
fuzz_target!(|data: &[u8]| {
    let Some((&a, rest)) = data.split_first() else { return };
    let spec = OuterCodeSpec {
        kind: OuterKind::BruteForceLinear,
        symbol_bits: 4,
        block_count: 8,
        message_symbols: 4,
        fold: 1,
        recovery: RecoveryParams { alpha: Rational::new(1, 4), box_limit: 16, list_bound: 1 << 16 },
    };
    let code = OuterCode::new(spec).unwrap();
    let mut boxes = vec![BTreeSet::new(); 8];
    for &c in rest {
        boxes[(c >> 4) as usize % 8].insert(u64::from(c & 0xf));
    }
    let alpha = Rational::new(u64::from(a % 9), 8);
    if let Ok(list) = code.list_recover(&RecoveryInput { boxes: boxes.clone(), alpha }) {
        for m in list {
            let cw = code.encode(&m).unwrap();
            let misses = cw.iter().zip(&boxes).filter(|(s, b)| !b.contains(s)).count();
            assert!(misses <= (a % 9) as usize);
        }
    }
});
