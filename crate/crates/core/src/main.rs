fn main() {
    std::process::exit(birkhoff_trees::cli::main_with_args(std::env::args_os()));
}
