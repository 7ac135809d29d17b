fn main() {
    std::process::exit(hyperelastic::cli::run(std::env::args_os()));
}
