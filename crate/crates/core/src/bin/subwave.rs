fn main() {
    std::process::exit(subwave::cli::run(std::env::args_os()));
}
