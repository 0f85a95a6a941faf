fn main() {
    if let Err(err) = kdom::cli::main_entry() {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}
