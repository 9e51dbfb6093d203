fn main() {
    std::process::exit(mgs::cli::main_with_args(std::env::args_os()));
}
