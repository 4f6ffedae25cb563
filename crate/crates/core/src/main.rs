fn main() {
    std::process::exit(netgauntlet::cli::main());
}
