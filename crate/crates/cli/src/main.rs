use std::process::ExitCode;

fn main() -> ExitCode {
    rendezvous_cli::run(std::env::args_os())
}
