fn main() {
    bealab::cli::main()
}
