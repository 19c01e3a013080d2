fn main() {
    std::process::exit(contrafact::cli::run(std::env::args_os()));
}
