fn main() {
    std::process::exit(randsamp_cli::run_cli(std::env::args_os()));
}
