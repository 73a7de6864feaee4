fn main() {
    std::process::exit(dirac_floquet::cli::run_cli(std::env::args_os()));
}
