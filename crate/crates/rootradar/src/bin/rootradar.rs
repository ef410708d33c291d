fn main() {
    std::process::exit(rootradar::cli::run(std::env::args_os()));
}
