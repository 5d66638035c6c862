fn main() {
    std::process::exit(casimir_sat::cli::main_with_args(std::env::args_os()));
}
