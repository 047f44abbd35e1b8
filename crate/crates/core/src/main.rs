fn main() {
    std::process::exit(metasinr::cli::main_with(std::env::args_os()));
}
