fn main() {
    std::process::exit(repairscore::cli::main_with_args(std::env::args_os()));
}
