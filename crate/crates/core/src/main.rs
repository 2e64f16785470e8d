fn main() -> std::process::ExitCode {
    randflight::cli::run()
}
