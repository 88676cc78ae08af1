fn main() {
    std::process::exit(tanglekh_cli::run(std::env::args_os()));
}
