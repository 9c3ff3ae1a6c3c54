pub mod baselines;
pub mod minimize;
pub mod report;
pub mod sample;
pub mod verify;
