fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(psdc_cli::run(&argv));
}
