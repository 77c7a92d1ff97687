fn main() {
    std::process::exit(sofic_cli::run(std::env::args_os()));
}
