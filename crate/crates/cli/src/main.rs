fn main() {
    std::process::exit(kml_cli::run(std::env::args_os()));
}
