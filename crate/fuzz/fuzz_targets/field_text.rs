#![no_main]
use gaborprop::corekit::io::{from_text, to_text};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(f) = from_text(s) {
        let back = from_text(&to_text(&f)).expect("printed field reparses");
        assert_eq!(back.values(), f.values());
    }
});
