fn main() {
    std::process::exit(sdym::cli::run());
}
