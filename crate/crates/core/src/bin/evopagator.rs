fn main() {
    std::process::exit(evopagator::cli::run(std::env::args_os()));
}
