//! File formats, reports, benchmarking and the command line for
//! [`hatsga_core`].

pub mod bench;
pub mod cli;
pub mod format;
pub mod report;
pub mod stats;

pub use format::{parse_network, serialize_network, ParseError};
