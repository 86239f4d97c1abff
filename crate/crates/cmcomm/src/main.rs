fn main() {
    std::process::exit(cmcomm::cli::run());
}
