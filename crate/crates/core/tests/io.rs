use gaborprop::corekit::io::{from_json, from_text, to_json, to_text};
use gaborprop::corekit::{Field, SpatialGrid};
use gaborprop::C64;
use proptest::prelude::*;

fn field(length: f64, log_n: u32, seed: Vec<(f64, f64)>) -> Field {
    let grid = SpatialGrid::new(length, 1 << log_n).unwrap();
    let values = (0..grid.n()).map(|j| {
        let (re, im) = seed[j % seed.len()];
        C64::new(re, im * (j as f64 + 1.0))
    });
    Field::new(grid, values.collect()).unwrap()
}

proptest! {
    #[test]
    fn text_round_trip_is_exact(length in 0.5f64..200.0, log_n in 3u32..9, seed in prop::collection::vec((-1e6f64..1e6, -1e3f64..1e3), 1..8)) {
        let f = field(length, log_n, seed);
        let back = from_text(&to_text(&f)).unwrap();
        prop_assert_eq!(back.grid(), f.grid());
        prop_assert_eq!(back.values(), f.values());
    }

    #[test]
    fn json_round_trip_is_exact(length in 0.5f64..200.0, log_n in 3u32..9, seed in prop::collection::vec((-1e300f64..1e300, -1e-300f64..1e-300), 1..8)) {
        let f = field(length, log_n, seed);
        let back = from_json(&to_json(&f)).unwrap();
        prop_assert_eq!(back.values(), f.values());
    }

    #[test]
    fn text_parser_never_panics(s in "\\PC{0,200}") {
        let _ = from_text(&s);
        let _ = from_json(&s);
    }
}

#[test]
fn malformed_text_reports_line() {
    let grid = SpatialGrid::new(8.0, 8).unwrap();
    let text = to_text(&Field::from_real_fn(grid, |x| x));
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    lines[3] = format!("{} nan 0", grid.x(2));
    let err = from_text(&lines.join("\n")).unwrap_err().to_string();
    assert!(err.contains("line 4"), "{err}");
    assert!(from_text("# L=8 n=8\n-4 0 0\n").is_err());
    assert!(from_text("# L=8\n").is_err());
    assert!(from_text("").is_err());
}
