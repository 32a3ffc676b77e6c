fn main() {
    std::process::exit(crnr::cli::main_with(std::env::args_os()));
}
