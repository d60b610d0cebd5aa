pub mod algorithm;
pub mod cli;
pub mod generator;
pub mod instance;
pub mod lp;
pub mod oracle;
pub mod polytope;
pub mod rational;
pub mod verify;
