fn main() {
    std::process::exit(qcharm::cli::run_cli(std::env::args_os()));
}
