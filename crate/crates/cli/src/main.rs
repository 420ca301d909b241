fn main() {
    std::process::exit(whitney_cli::run(std::env::args_os()));
}
