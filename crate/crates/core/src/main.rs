fn main() {
    std::process::exit(revgeo::cli::run(std::env::args_os()));
}
