//! Command line, file formats and benchmarks for `fedmife-core`: threaded
//! execution, wall-clock timing, scenario and transcript files, CSV reports.

pub mod bench;
pub mod correctness;
mod error;
pub mod exec;
pub mod formats;
pub mod keys;
pub mod sweep;

pub use error::{Error, Result};
pub use exec::{ChunkedThreads, WallClock};
