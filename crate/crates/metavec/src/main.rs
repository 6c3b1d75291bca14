fn main() -> std::process::ExitCode {
    metavec::cli::main()
}
