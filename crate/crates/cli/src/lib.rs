//! `sword` command-line tool and HTTP service.

pub mod cli;
pub mod service;

pub use cli::run;
