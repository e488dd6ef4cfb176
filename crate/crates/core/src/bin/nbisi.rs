use std::process::ExitCode;

fn main() -> ExitCode {
    nbisi::cli::run()
}
