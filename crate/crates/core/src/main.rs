fn main() -> std::process::ExitCode {
    cropload::cli::main_entry()
}
