pub mod exec;
pub mod group_algebra;
mod keys;
pub mod spin_network;
pub mod tensor;
pub mod path_integral;
pub mod two_complex;
pub mod classifier;
