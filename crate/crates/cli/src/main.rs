fn main() {
    std::process::exit(pareto_trm_cli::run_cli(std::env::args_os()));
}
