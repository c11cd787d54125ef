use std::process::ExitCode;

fn main() -> ExitCode {
    gbselect::cli::main()
}
