//! Thin wrapper: all behavior lives in the library's `cli` module.

fn main() {
    std::process::exit(tifuknn::cli::run(std::env::args_os()));
}
