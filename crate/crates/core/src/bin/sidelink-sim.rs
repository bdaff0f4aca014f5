fn main() {
    std::process::exit(sidelink_sim::cli::main_with_args(std::env::args_os()));
}
