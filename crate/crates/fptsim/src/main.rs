fn main() {
    std::process::exit(fptsim::cli::run(std::env::args_os()));
}
