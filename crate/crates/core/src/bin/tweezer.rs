fn main() {
    std::process::exit(tweezer::cli::main_with_args(std::env::args_os()));
}
