fn main() {
    std::process::exit(magnomech::cli::run(std::env::args_os()));
}
