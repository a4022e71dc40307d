use std::process::ExitCode;

fn main() -> ExitCode {
    cpneq::cli::main()
}
