fn main() {
    std::process::exit(lvs_sim::cli::main_with_args(std::env::args_os()));
}
