#![no_main]
use gaborprop_cli::config::RunConfig;
use libfuzzer_sys::fuzz_target;

// Parsing only; `load` would also touch the filesystem.
fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = RunConfig::parse(s) {
        let again = RunConfig::parse(&cfg.to_toml()).expect("serialized config reparses");
        assert_eq!(again, cfg);
    }
});
