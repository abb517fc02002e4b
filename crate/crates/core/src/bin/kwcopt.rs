fn main() {
    std::process::exit(kwcopt::cli::main_with(std::env::args_os()));
}
