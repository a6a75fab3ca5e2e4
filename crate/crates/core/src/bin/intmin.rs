fn main() -> std::process::ExitCode {
    intmin::cli::main_with_args(std::env::args_os())
}
