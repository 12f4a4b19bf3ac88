fn main() {
    std::process::exit(mpet::cli::main_with_args(std::env::args_os()));
}
