#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(values) = bmhull::cli::parse_real_list(text) {
            assert!(!values.is_empty());
            assert!(values.iter().all(|x| x.is_finite()));
        }
    }
});
