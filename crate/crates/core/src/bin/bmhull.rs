fn main() {
    std::process::exit(bmhull::cli::dispatch(std::env::args_os()));
}
