//! Fuzz the TOML configuration front end: parsing plus semantic
//! validation must never panic on arbitrary input.

#![no_main]
use libfuzzer_sys::fuzz_target;
use mfg_theta::harness::config::Config;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = Config::from_str(s);
    }
});
