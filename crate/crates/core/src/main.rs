fn main() {
    std::process::exit(phaserec::cli::run(std::env::args()));
}
