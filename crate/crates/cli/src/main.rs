fn main() {
    std::process::exit(kmtlab_cli::run(std::env::args_os()));
}
