#![no_main]

use bmhull::geometry::{parse_hull_dump, write_hull_dump};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(hull) = parse_hull_dump(text) {
            let again = parse_hull_dump(&write_hull_dump(&hull)).unwrap();
            assert_eq!(again.vertex_indices(), hull.vertex_indices());
        }
    }
});
