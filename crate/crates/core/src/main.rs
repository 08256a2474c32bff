fn main() {
    std::process::exit(lmap_prng::cli::main_with(std::env::args_os()));
}
