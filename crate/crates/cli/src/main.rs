fn main() {
    std::process::exit(spa_lab::run(std::env::args_os()));
}
