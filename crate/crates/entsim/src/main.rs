use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(entsim::cli::main_with_args(std::env::args()) as u8)
}
