fn main() {
    std::process::exit(evidal_cli::run_subcommand(std::env::args_os()));
}
