fn main() {
    std::process::exit(oscicut::cli::run(std::env::args_os()));
}
