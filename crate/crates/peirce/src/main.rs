fn main() {
    std::process::exit(peirce::cli::run(std::env::args_os()));
}
