fn main() -> std::process::ExitCode {
    std::process::ExitCode::from(motion_gadgets::cli::run(std::env::args_os()))
}
