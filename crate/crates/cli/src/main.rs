fn main() {
    let code = biphoton_cli::run(std::env::args_os());
    std::process::exit(code as i32);
}
