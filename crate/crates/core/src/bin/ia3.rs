fn main() {
    std::process::exit(ia3::cli::main_with_args(std::env::args_os()));
}
