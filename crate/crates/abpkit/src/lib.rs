//! Exact symbolic toolkit for algebraic branching programs (ABPs) and
//! algebraic formulas: constructions, depth/degree reduction transforms
//! with auditable error ledgers, and independent verification oracles.

pub mod abp;
pub mod constructions;
pub mod field;
pub mod formula;
pub mod gen;
pub mod layered;
pub mod poly;
pub mod report;
pub mod unlayered;
pub mod verify;
