fn main() {
    std::process::exit(capkit::cli::dispatch(std::env::args_os()));
}
