fn main() {
    std::process::exit(milnor_tangent::cli::run(std::env::args_os()));
}
