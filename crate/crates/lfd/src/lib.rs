//! JSON file formats and the command line for `lfd-core`.

pub mod cli;
pub mod io;
