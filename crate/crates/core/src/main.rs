fn main() {
    std::process::exit(nffd::cli::run());
}
