fn main() {
    std::process::exit(doi_lab_harness::cli_main(std::env::args_os()));
}
