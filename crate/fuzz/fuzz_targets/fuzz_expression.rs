//! Fuzz the analytic expression parser used for terminal costs and
//! initial densities.

#![no_main]
use libfuzzer_sys::fuzz_target;
use mfg_theta::harness::expressions::parse_expression;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = parse_expression(s);
    }
});
