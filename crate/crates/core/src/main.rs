fn main() {
    std::process::exit(recon_core::cli::run(std::env::args_os()));
}
