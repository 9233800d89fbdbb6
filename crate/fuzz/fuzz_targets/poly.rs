#![no_main]
use congruence_core::poly::PolyRing;
use congruence_core::Dvr;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    for o in [Dvr::p_adic(5).unwrap(), Dvr::power_series(4).unwrap()] {
        let ring = PolyRing::new(o, vec!["x".into(), "y".into(), "z1".into()]).unwrap();
        if let Ok(p) = ring.parse(s) {
            // printing is a right inverse of parsing
            let shown = ring.show(&p);
            assert_eq!(ring.parse(&shown).as_ref(), Ok(&p), "{shown}");
        }
    }
});
