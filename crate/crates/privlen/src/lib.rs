//! File formats, instance generators and the batch front end for
//! `privlen-core`.

pub mod checks;
pub mod codefile;
pub mod doc;
pub mod families;
pub mod input;
pub mod report;
pub mod run;

pub use input::{parse_distribution, read_distribution, InputError};
pub use run::{run, Command, OutputFormat, RunConfig, RunOutcome};
