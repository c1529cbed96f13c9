fn main() -> std::process::ExitCode {
    dispersion_lab::harness::cli::main()
}
