#![no_main]
use congruence_core::poly::Bounds;
use congruence_core::problem::Problem;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    // small bounds keep standard-basis work per input short
    let bounds = Bounds {
        degree: 8,
        valuation: 16,
    };
    let _ = Problem::parse(s, bounds);
});
