fn main() -> std::process::ExitCode {
    facet_volumes_cli::main_exit()
}
