fn main() {
    std::process::exit(omska_cli::main_with(std::env::args_os()));
}
