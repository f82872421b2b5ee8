fn main() {
    std::process::exit(lvc_eval::cli::run(std::env::args_os()));
}
