//! Command-line harness: growth tables, dimension scans, verification
//! suites, diagonalisation and censuses.

pub mod commands;
pub mod config;
pub mod exit;
pub mod growth;
pub mod output;
pub mod scan;
pub mod verify;
