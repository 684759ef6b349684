fn main() {
    std::process::exit(longmem::cli::run(std::env::args_os()));
}
