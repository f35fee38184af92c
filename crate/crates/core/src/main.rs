fn main() {
    std::process::exit(fcsw_core::cli::main_with_args(std::env::args_os()));
}
