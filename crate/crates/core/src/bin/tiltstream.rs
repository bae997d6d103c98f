fn main() {
    std::process::exit(tiltstream::cli::main_exit_code());
}
