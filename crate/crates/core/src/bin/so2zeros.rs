fn main() {
    std::process::exit(so2zeros::cli::run(std::env::args_os()));
}
