fn main() {
    std::process::exit(compsel::cli::run(std::env::args_os()));
}
