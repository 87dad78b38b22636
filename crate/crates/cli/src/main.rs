fn main() {
    std::process::exit(fqslice_cli::run(std::env::args_os()));
}
