#![no_main]
use gaborprop::corekit::SpatialGrid;
use gaborprop_cli::config::parse_sampled;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let grid = SpatialGrid::new(2.0 * std::f64::consts::PI, 8).unwrap();
    if let Ok(sym) = parse_sampled(s, grid) {
        let _ = sym.jet(0.3, -0.7);
    }
});
