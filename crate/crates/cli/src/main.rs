fn main() {
    std::process::exit(stable_flows_cli::main_with_args(std::env::args_os()));
}
