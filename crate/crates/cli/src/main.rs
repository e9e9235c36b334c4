fn main() {
    std::process::exit(subeval_cli::run(std::env::args_os()));
}
