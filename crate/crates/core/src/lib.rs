//! Worst-case optimal evaluation of disjunctive datalog rules (DDRs) and
//! conjunctive queries under degree constraints.
//!
//! The pipeline has four stages:
//!
//! 1. [`bound`] solves a linear program over the polymatroid cone and returns
//!    an exactly verified Shannon-flow inequality together with the output
//!    budget `B`.
//! 2. [`shannon`] turns the integral form of that inequality into a proof
//!    sequence and implements the reset construction.
//! 3. [`measure`] materializes sub-probability measures with exact rational
//!    weights.
//! 4. [`exec`] replays the proof sequence over measures, truncating products
//!    below `1/B` and branching on resets.
//!
//! [`cq`] builds the conjunctive-query driver on top (tree decompositions,
//! fractional hypertree and submodular width, Yannakakis assembly), and
//! [`oracle`] holds the brute-force reference used throughout the tests.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bound;
pub mod cq;
pub mod database;
pub mod ddr;
pub mod degree;
mod error;
pub mod exec;
pub mod fixtures;
pub mod lp;
pub mod measure;
pub mod num;
pub mod oracle;
pub mod relation;
pub mod shannon;
pub mod value;
pub mod vars;

pub use error::{Error, Result};
