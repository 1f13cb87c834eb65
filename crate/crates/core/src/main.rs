fn main() {
    std::process::exit(relu_bandit::cli::run_from(std::env::args_os()));
}
