//! Library surface of the `enclose` command-line front end: scenario-file
//! schema, CSV trajectory output and the flat metrics format.

pub mod config;
pub mod output;
