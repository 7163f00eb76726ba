fn main() {
    std::process::exit(lidkit::cli::run_from(std::env::args_os()));
}
