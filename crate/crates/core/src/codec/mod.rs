//! The concatenated code: outer list-recoverable code over a sync sequence of inner codes.

mod channel;
mod concat;
mod params;

pub use channel::{apply_edits, corrupt_blocks, delete_blocks, random_edit_script, EditOp, EditScript};
pub use concat::{
    overall_rate, window_plan, BlockHit, Codeword, ConcatCode, DecodeOutput, DecodeReport, RateReport, StageOne, StageTimings,
    WindowHits,
};
pub use params::{derive_params, rate_lower_bound_formula, ConcatParams, DerivedParams, ParamMode};
