fn main() {
    // CLI wiring lands after the library surface settles.
    eprintln!("framecode: not yet wired");
    std::process::exit(2);
}
