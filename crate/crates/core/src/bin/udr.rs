fn main() {
    std::process::exit(udr::cli::main());
}
