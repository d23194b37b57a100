#![no_main]

use libfuzzer_sys::fuzz_target;

// First byte picks the dimension; the rest are little-endian f64 coordinates.
fuzz_target!(|data: &[u8]| {
    let Some((&d, rest)) = data.split_first() else { return };
    let dim = 1 + (d as usize % 4);
    let coords: Vec<f64> = rest
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .take(64 * dim)
        .collect();
    if coords.len() < dim || coords.iter().any(|x| !x.is_finite() || x.abs() > 1e6) {
        return;
    }
    let usable = coords.len() / dim * dim;
    if let Ok(hull) = bmhull::geometry::convex_hull(&coords[..usable], dim) {
        assert!(hull.volume() >= 0.0);
        assert!(hull.max_violation(&coords[..usable]) <= 1e3 * hull.tolerance());
    }
});
