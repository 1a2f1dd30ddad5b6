//! One module per subcommand; each returns a process exit code.

pub mod hypothesize;
pub mod lattice;
pub mod omega;
pub mod run;
