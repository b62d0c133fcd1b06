//! File formats, scans and report rendering behind the `sedf` binary.

pub mod family;
pub mod options;
pub mod report;
pub mod scan;
pub mod table;

pub use options::{parse_caps, parse_range};
