//! Command line front end for `graphpass-core`: input file parsers, the run
//! manifest, and JSON/CSV/text artifacts.

pub mod commands;
pub mod error;
pub mod export;
pub mod files;
pub mod manifest;

use std::ffi::OsString;

pub use error::{exit, CliError, CliResult};
pub use manifest::{parse_manifest, Parsed, RunManifest};

/// Parses `argv`, runs the command and returns the process exit code.
/// Errors go to stderr as `error[<reason>]: <message>`.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let result = parse_manifest(argv).and_then(|p| match p {
        Parsed::Print(text) => {
            export::flush_stdout(&text);
            Ok(())
        }
        Parsed::Run(m) => commands::run(&m),
    });
    match result {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.reason());
            e.exit_code()
        }
    }
}
