fn main() {
    std::process::exit(santalo::cli::main_with(std::env::args_os()));
}
