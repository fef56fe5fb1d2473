fn main() {
    std::process::exit(lohe_cli::main_with_args(std::env::args_os()));
}
