//! File formats, figure presets and the command-line front end for
//! [`magnomech_core`].

pub mod cli;
pub mod config;
pub mod csv;
pub mod presets;
pub mod run;
