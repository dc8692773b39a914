//! Oracles written without reference to the library's own interpreters.
//!
//! Each one recomputes an answer the slow, obvious way so tests can compare
//! it with what the library produced.

pub mod brute;
pub mod exprgen;
pub mod matcher;
pub mod splitmix;
