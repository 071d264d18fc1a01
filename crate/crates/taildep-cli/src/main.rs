fn main() {
    std::process::exit(taildep_cli::run(std::env::args_os()));
}
