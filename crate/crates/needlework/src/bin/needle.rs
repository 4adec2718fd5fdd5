fn main() {
    std::process::exit(needlework::cli::run(std::env::args()));
}
