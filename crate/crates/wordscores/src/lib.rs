//! File formats, the batch pipeline and the command-line front end around
//! `wordscores-core`.

pub mod config;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod plotdata;
pub mod stem;
pub mod synth;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use pipeline::{run_pipeline, RunReport};
pub use wordscores_core as core;
