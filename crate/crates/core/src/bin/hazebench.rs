fn main() {
    std::process::exit(hazebench::cli::run(std::env::args_os()));
}
