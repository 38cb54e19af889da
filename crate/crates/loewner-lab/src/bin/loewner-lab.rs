fn main() {
    std::process::exit(loewner_lab::cli::run(std::env::args_os()));
}
