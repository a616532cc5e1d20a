fn main() {
    std::process::exit(gridcache_cli::run(std::env::args_os()));
}
