fn main() {
    std::process::exit(etc_cli::run_from_args(std::env::args_os()));
}
