#![no_main]
use congruence_core::poly::parse_scalar;
use congruence_core::Dvr;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    for o in [Dvr::p_adic(691).unwrap(), Dvr::power_series(9).unwrap()] {
        if let Ok(x) = parse_scalar(&o, s) {
            if !x.is_zero() {
                let _ = o.valuation(&x);
            }
        }
    }
});
