fn main() {
    std::process::exit(qharmonics_cli::run(std::env::args_os()));
}
