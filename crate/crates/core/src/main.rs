fn main() {
    std::process::exit(omegarel::cli::run(std::env::args_os()));
}
