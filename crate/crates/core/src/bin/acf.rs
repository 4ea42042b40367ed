fn main() {
    std::process::exit(acf_heisenberg::cli::run(std::env::args_os()));
}
