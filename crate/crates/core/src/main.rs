fn main() {
    std::process::exit(stable_stein::cli::run(std::env::args_os()));
}
