//! Front end for `qpc`: parses flags, runs one computation and renders the
//! result as CSV or JSON.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 invalid input.

pub mod args;
mod commands;
pub mod output;
mod presets;
pub mod settings;
mod verify;

use std::io::Write;

use clap::Parser;

pub use args::{Cli, Command};
pub use output::Report;
use settings::Settings;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] qpc_core::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;

/// Runs the parsed command and returns its report.
pub fn execute(cli: &Cli) -> Result<(Report, Settings), CliError> {
    let s = Settings::resolve(&cli.common)?;
    let report = match &cli.command {
        Command::BmProb { paper_table_1, apparatus } => commands::bm_prob(&s, *paper_table_1, (*apparatus).into())?,
        Command::PmuTable { paper_table_s1 } => commands::pmu_table(&s, *paper_table_s1)?,
        Command::Rate { apparatus } => commands::rate(&s, (*apparatus).into())?,
        Command::Curve {
            paper_fig3,
            spacing_min_km,
            spacing_max_km,
            spacing_step_km,
        } => commands::curve(&s, *paper_fig3, *spacing_min_km, *spacing_max_km, *spacing_step_km)?,
        Command::Optimize {
            n_min,
            n_max,
            m_min,
            m_max,
            spacing_min_km,
            spacing_max_km,
            top,
            apparatus,
            compare_perfect,
        } => {
            let req = commands::OptimizeRequest {
                space: qpc_core::SearchSpace {
                    n: *n_min..=*n_max,
                    m: *m_min..=*m_max,
                    spacing_km: *spacing_min_km..=*spacing_max_km,
                },
                top: *top,
                apparatus: (*apparatus).into(),
                compare_perfect: *compare_perfect,
            };
            commands::optimize(&s, &req)?
        }
        Command::Resources { sources, target_rate } => commands::resources(&s, *sources, *target_rate)?,
        Command::Verify { max_photons } => verify::run(&s, *max_photons)?,
    };
    Ok((report, s))
}

/// Full program: parse `args`, run, write the output, return the exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_BAD_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli).and_then(|(report, s)| {
        let text = report.render(s.format).map_err(CliError::Input)?;
        match &s.out {
            Some(path) => std::fs::write(path, text)?,
            None => stdout.write_all(text.as_bytes())?,
        }
        Ok(report.passed)
    }) {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            let _ = writeln!(stderr, "verification failed");
            EXIT_VERIFICATION_FAILED
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_BAD_INPUT
        }
    }
}
