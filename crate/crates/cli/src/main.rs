fn main() {
    std::process::exit(graphpass_cli::main_with_args(std::env::args_os()));
}
