#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let args = std::iter::once("bmhull").chain(text.split('\0'));
        if let Ok(Some(mut cfg)) = bmhull::cli::parse_argv(args) {
            let _ = cfg.reals("alphas", Some(&[]));
            let _ = cfg.real("alpha", Some(0.0));
            let _ = cfg.uint("replicates", Some(1));
            let _ = cfg.digest();
        }
    }
});
