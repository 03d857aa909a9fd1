fn main() {
    std::process::exit(luroth::cli::run(std::env::args_os()));
}
