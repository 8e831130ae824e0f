use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(indep_cli::cli_main())
}
