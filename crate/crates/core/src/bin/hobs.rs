fn main() {
    std::process::exit(hobs::cli::main());
}
