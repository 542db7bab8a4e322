fn main() {
    let code = hesmooth::cli::run(std::env::args_os());
    std::process::exit(code as i32);
}
