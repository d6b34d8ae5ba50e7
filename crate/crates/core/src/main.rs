fn main() {
    std::process::exit(gauss_hecke::cli::run());
}
