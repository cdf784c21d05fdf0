use std::process::ExitCode;

fn main() -> ExitCode {
    deon::cli::run()
}
