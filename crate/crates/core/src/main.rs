fn main() {
    std::process::exit(mixmoment::cli::run_command(std::env::args_os()));
}
