fn main() {
    std::process::exit(kerrcat::cli::run());
}
