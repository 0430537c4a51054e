//! Library surface of the `csym` command-line tool: matrix file I/O,
//! structured reports, and the command implementations. `main` is a thin
//! argument-parsing shell over [`commands`].

pub mod commands;
pub mod matfile;
pub mod report;

pub use commands::{
    cmd_aluthge, cmd_certify, cmd_extend, cmd_find_negative, cmd_gen, cmd_montecarlo, cmd_oracle,
    with_pool, CliError, RankChoice,
};
pub use matfile::{read_matrix, render_matrix, write_matrix, MatFileError};
pub use report::Report;
