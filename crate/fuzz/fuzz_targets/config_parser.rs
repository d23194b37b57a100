#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(map) = bmhull::cli::parse_config(text) {
            let rendered: String = map.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
            assert_eq!(bmhull::cli::parse_config(&rendered).unwrap(), map);
        }
    }
});
