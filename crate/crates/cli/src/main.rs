use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(kraw_cli::run(std::env::args_os()) as u8)
}
