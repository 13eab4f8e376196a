use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(spherecode::cli::run())
}
