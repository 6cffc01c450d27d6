fn main() {
    std::process::exit(divopt::cli::run(std::env::args_os()));
}
