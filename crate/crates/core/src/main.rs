fn main() {
    std::process::exit(dcp_core::cli::main_entry());
}
