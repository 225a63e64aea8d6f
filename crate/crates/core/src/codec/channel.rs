use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitlinalg::BitVector;
use crate::error::{Error, Result};

/// A single edit; positions refer to the string as it stands when the edit is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum EditOp {
    Insert { pos: usize, bit: bool },
    Delete { pos: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditScript {
    pub ops: Vec<EditOp>,
}

impl EditScript {
    pub fn cost(&self) -> usize {
        self.ops.len()
    }

    /// The same edits applied to a string that starts `offset` bits later.
    pub fn shifted(&self, offset: usize) -> EditScript {
        let ops = self
            .ops
            .iter()
            .map(|op| match *op {
                EditOp::Insert { pos, bit } => EditOp::Insert { pos: pos + offset, bit },
                EditOp::Delete { pos } => EditOp::Delete { pos: pos + offset },
            })
            .collect();
        EditScript { ops }
    }
}

pub fn apply_edits(x: &BitVector, script: &EditScript) -> Result<BitVector> {
    let mut y = x.clone();
    for op in &script.ops {
        y = match *op {
            EditOp::Insert { pos, bit } => y.with_inserted(pos, bit)?,
            EditOp::Delete { pos } => {
                if pos >= y.len() {
                    return Err(Error::OutOfRange { index: pos, len: y.len() });
                }
                y.with_removed(pos)?
            }
        };
    }
    Ok(y)
}

/// `budget` uniformly chosen insertions and deletions, reproducible from `seed`.
pub fn random_edit_script(x: &BitVector, budget: usize, seed: u64) -> EditScript {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut len = x.len();
    let mut ops = Vec::with_capacity(budget);
    for _ in 0..budget {
        if len > 0 && rng.random_bool(0.5) {
            ops.push(EditOp::Delete { pos: rng.random_range(0..len) });
            len -= 1;
        } else {
            ops.push(EditOp::Insert { pos: rng.random_range(0..=len), bit: rng.random() });
            len += 1;
        }
    }
    EditScript { ops }
}

/// Applies `edits[i].1` random edits inside block `edits[i].0` of a codeword made of
/// `block_len`-bit blocks. Blocks keep their identity, so corruptions never straddle.
pub fn corrupt_blocks(x: &BitVector, block_len: usize, edits: &[(usize, usize)], seed: u64) -> Result<BitVector> {
    if block_len == 0 || !x.len().is_multiple_of(block_len) {
        return Err(Error::param(format!("{} bits do not split into {block_len}-bit blocks", x.len())));
    }
    let blocks = x.len() / block_len;
    let mut per_block = vec![0usize; blocks];
    for &(j, e) in edits {
        if j >= blocks {
            return Err(Error::OutOfRange { index: j, len: blocks });
        }
        per_block[j] += e;
    }
    let mut out = BitVector::new();
    for (j, &e) in per_block.iter().enumerate() {
        let block = x.slice(j * block_len, (j + 1) * block_len)?;
        let script = random_edit_script(&block, e, crate::seed::derive(seed, 0xed17, j as u64));
        out.extend_from(&apply_edits(&block, &script)?);
    }
    Ok(out)
}

/// Removes blocks wholesale.
pub fn delete_blocks(x: &BitVector, block_len: usize, drop: &[usize]) -> Result<BitVector> {
    if block_len == 0 || !x.len().is_multiple_of(block_len) {
        return Err(Error::param(format!("{} bits do not split into {block_len}-bit blocks", x.len())));
    }
    let mut out = BitVector::new();
    for j in 0..x.len() / block_len {
        if !drop.contains(&j) {
            out.extend_from(&x.slice(j * block_len, (j + 1) * block_len)?);
        }
    }
    Ok(out)
}
