fn main() {
    std::process::exit(dilatation::cli::main_with_args());
}
