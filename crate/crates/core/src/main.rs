fn main() {
    std::process::exit(zygmund_lab::cli::run(std::env::args_os()));
}
