fn main() {
    std::process::exit(synth_audit::cli::run());
}
