fn main() {
    std::process::exit(sepprof_cli::run(std::env::args_os()));
}
