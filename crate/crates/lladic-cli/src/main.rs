use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(lladic_cli::run(std::env::args()) as u8)
}
