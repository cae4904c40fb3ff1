fn main() {
    let code = kta::app::main(std::env::args_os());
    std::process::exit(code);
}
