fn main() {
    std::process::exit(qrstab::cli::run(std::env::args_os()));
}
