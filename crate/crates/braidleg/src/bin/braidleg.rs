fn main() {
    std::process::exit(braidleg::cli::run());
}
