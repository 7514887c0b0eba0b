fn main() {
    std::process::exit(ramsey_aqc::cli::cli_main(std::env::args_os()));
}
