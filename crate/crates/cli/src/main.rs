fn main() {
    std::process::exit(madbound_cli::run_from_args(std::env::args_os()));
}
