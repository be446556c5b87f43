fn main() -> std::process::ExitCode {
    std::process::ExitCode::from(subeq_cli::run(std::env::args_os().collect()))
}
