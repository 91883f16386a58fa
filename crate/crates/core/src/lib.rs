pub mod axioms;
pub mod cli;
pub mod csv;
pub mod differential;
pub mod error;
pub mod instances;
pub mod limit;
pub mod metric;
pub mod point;
pub mod sampling;
pub mod structure;
pub mod tangent;
pub mod trees;
