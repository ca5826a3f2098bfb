use std::process::ExitCode;

fn main() -> ExitCode {
    hn4_search::cli::main()
}
