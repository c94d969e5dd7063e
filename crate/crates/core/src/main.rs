fn main() {
    std::process::exit(cpip::cli::run(std::env::args_os()));
}
