fn main() {
    std::process::exit(tautring::cli::main_with_env());
}
