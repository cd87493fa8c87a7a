fn main() {
    std::process::exit(wavescope::run(std::env::args_os()));
}
