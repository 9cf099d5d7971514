fn main() {
    std::process::exit(entangle_cli::run(std::env::args_os()));
}
