fn main() {
    aqec::cli::main()
}
