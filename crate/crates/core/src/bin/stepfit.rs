fn main() -> std::process::ExitCode {
    stepfit::cli::main()
}
