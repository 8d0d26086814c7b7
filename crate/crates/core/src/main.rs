fn main() {
    std::process::exit(infostruct::cli::main_with_args(std::env::args_os()));
}
