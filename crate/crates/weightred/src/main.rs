fn main() {
    std::process::exit(weightred::cli::run());
}
