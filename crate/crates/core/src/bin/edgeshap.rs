fn main() {
    std::process::exit(edgeshap::cli::run(std::env::args_os()));
}
