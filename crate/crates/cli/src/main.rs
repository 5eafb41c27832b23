fn main() {
    std::process::exit(dpisat_cli::main_with_args(std::env::args_os()));
}
