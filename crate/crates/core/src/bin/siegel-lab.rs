fn main() -> std::process::ExitCode {
    siegel_lab::cli::run(std::env::args_os())
}
