fn main() {
    let (code, text) = usp_cli::run(std::env::args());
    if code == 2 && !text.trim_start().starts_with('{') {
        eprint!("{text}");
    } else {
        println!("{text}");
    }
    std::process::exit(code);
}
