fn main() {
    std::process::exit(randsee::cli::main());
}
