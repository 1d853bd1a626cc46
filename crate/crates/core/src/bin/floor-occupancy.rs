fn main() {
    std::process::exit(floor_occupancy::cli::main_with(std::env::args_os()));
}
