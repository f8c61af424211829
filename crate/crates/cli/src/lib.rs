//! File formats, instance generators and the `flowjoin` command line on top
//! of `flowjoin-core`.

pub mod cli;
pub mod gen;
pub mod parse;
pub mod tsv;
