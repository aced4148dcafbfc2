fn main() -> std::process::ExitCode {
    driftopt::cli::main()
}
