fn main() {
    std::process::exit(coupled_scatter::cli::run(std::env::args_os()));
}
