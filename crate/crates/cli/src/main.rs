fn main() {
    std::process::exit(pinchcert_cli::run(std::env::args_os()));
}
