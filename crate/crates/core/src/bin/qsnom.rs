fn main() {
    std::process::exit(qsnom::harness::run(std::env::args_os()));
}
