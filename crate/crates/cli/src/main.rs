use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(casimir_cli::app::main(std::env::args_os()) as u8)
}
