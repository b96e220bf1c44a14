fn main() {
    std::process::exit(plap_bounds::cli::run(std::env::args_os()));
}
