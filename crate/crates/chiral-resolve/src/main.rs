fn main() {
    std::process::exit(chiral_resolve::cli::run());
}
