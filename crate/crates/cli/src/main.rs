fn main() {
    std::process::exit(concentrate_cli::run(std::env::args_os()));
}
