fn main() {
    std::process::exit(sfd::cli::main_with_args(std::env::args_os()));
}
