fn main() {
    std::process::exit(ou_spectra_cli::run(std::env::args_os()));
}
