//! File handling, records, and configuration for the logdoc passage
//! retrieval engine. The algorithms live in `logdoc-core`; this crate adds
//! everything that touches the filesystem plus the command-line interface.

pub mod config;
pub mod kbfile;
pub mod records;
pub mod resources;
