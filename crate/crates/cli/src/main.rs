fn main() {
    std::process::exit(sincwarp_cli::main_with_args(std::env::args_os()));
}
