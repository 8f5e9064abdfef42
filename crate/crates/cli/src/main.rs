use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(gost_cli::run(std::env::args_os()))
}
