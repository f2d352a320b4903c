fn main() {
    std::process::exit(dp1::cli::main_with_args(std::env::args_os()));
}
