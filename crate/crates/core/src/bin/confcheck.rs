fn main() {
    std::process::exit(confcheck::cli::main_with_args(std::env::args_os()));
}
