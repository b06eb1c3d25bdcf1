fn main() {
    let code = wellspring::cli::run(std::env::args_os());
    std::process::exit(code);
}
