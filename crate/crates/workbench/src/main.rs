fn main() {
    std::process::exit(mtt_workbench::cli::run(std::env::args_os()));
}
