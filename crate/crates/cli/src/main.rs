fn main() {
    std::process::exit(sword_cli::run(std::env::args_os()));
}
