fn main() {
    std::process::exit(loopforge::cli::run(std::env::args_os()));
}
