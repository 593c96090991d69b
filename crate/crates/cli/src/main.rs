fn main() {
    std::process::exit(reset_search_cli::run_main());
}
