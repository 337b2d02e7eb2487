fn main() {
    std::process::exit(nh_entangle::cli::run(std::env::args_os()));
}
