fn main() {
    std::process::exit(astra_cli::run_cli(std::env::args_os()));
}
