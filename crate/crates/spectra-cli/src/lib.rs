//! Library half of the CLI: sweep orchestration and deterministic report
//! formatting. The binary in `main.rs` is a thin argument layer over this.

pub mod report;
pub mod sweep;

pub use report::Format;
pub use sweep::{run_sweep, SweepRecord};
