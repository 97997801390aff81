fn main() {
    std::process::exit(rtorsion_cli::cli_run(std::env::args_os()));
}
