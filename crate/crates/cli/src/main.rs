fn main() {
    std::process::exit(fbjacobi_cli::run(std::env::args_os()).code());
}
