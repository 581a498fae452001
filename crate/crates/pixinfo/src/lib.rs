//! File formats, synthetic images and the command-line front end for
//! [`pixinfo_core`].

pub mod check;
pub mod cli;
pub mod dump;
pub mod pgm;
pub mod report;
pub mod synth;

pub use pgm::{read_pgm, write_pgm, PgmError, PgmMode};
pub use synth::{synthesize, Generator, SynthError};
