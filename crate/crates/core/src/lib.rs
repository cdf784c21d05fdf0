//! Deontic reasoning over finite propositional models: Hamming distances,
//! quality orders, derived obligations, and machine-checked claims.

pub mod cli;
pub mod formula;
pub mod lab;
pub mod metric;
pub mod model;
pub mod obligations;
pub mod quality;
pub mod size;
