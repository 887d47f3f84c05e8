fn main() {
    std::process::exit(lagconf::cli::main_with_args(std::env::args_os()));
}
