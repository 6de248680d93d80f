fn main() {
    std::process::exit(stgeo::cli::run(std::env::args_os()));
}
