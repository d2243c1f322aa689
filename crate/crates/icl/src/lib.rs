//! File formats, brute-force oracles, parallel searches and the command line
//! on top of `icl-core`.

pub mod cli;
pub mod formats;
pub mod oracle;
pub mod parallel;
