use std::process::ExitCode;

fn main() -> ExitCode {
    mcdm_cli::run(std::env::args_os())
}
