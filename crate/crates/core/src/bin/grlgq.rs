fn main() {
    std::process::exit(grlgq::cli::run(std::env::args_os()));
}
