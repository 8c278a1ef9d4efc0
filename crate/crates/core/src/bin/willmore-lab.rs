fn main() {
    std::process::exit(willmore_lab::cli::main_with_args(std::env::args_os()));
}
