fn main() {
    std::process::exit(pathfield::cli::run(std::env::args_os()));
}
