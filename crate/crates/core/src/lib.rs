pub mod cli;
pub mod clifford_rep;
pub mod exactlin;
pub mod htype;
pub mod integral_basis;
pub mod involution_engine;
pub mod tensor_periodicity;
