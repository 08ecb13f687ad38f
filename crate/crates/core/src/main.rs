fn main() {
    std::process::exit(qdesign_codes::cli::main_with_args(std::env::args_os()));
}
