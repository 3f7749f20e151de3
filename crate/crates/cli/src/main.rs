fn main() {
    std::process::exit(trawlkit_cli::run(std::env::args()));
}
