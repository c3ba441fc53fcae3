fn main() {
    std::process::exit(pptmaps_cli::run(std::env::args_os()));
}
