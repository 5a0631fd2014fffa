fn main() {
    std::process::exit(atomwall::cli::main_entry());
}
