pub mod cli;
pub mod heisenberg;
pub mod lattice;
pub mod products;
pub mod repmod;
pub mod scalarfield;
pub mod voperator;
