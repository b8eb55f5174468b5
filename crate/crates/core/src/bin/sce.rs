fn main() {
    std::process::exit(sce::harness::cli::main_with_args(std::env::args_os()));
}
