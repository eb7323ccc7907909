fn main() {
    std::process::exit(fractel::cli::run(std::env::args_os()));
}
