pub mod circuit;
pub mod error;
pub mod noise;
pub mod pauli;
pub mod tableau;
pub mod clinr;
pub mod arch;
pub mod engine;
pub mod bounds;
pub mod synthetic;
pub mod harness;
