fn main() {
    std::process::exit(elemtrend::cli::run(std::env::args_os()));
}
