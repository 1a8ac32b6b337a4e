pub mod chartgen;
pub mod metrics;
pub mod table;
pub mod qa;
pub mod cli;
