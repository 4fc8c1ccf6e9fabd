fn main() {
    std::process::exit(plasmon_qed::cli::main_with_args(std::env::args_os()));
}
