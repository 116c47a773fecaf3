fn main() {
    std::process::exit(vacuum_focus::cli::run());
}
