fn main() {
    std::process::exit(cavity_bec::cli::run(std::env::args_os()));
}
