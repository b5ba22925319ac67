fn main() {
    std::process::exit(linforms_cli::main_with(std::env::args_os()));
}
