use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(hts_sim::cli::main_with_args(std::env::args_os()))
}
