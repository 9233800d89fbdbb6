#![no_main]
use congruence_core::poly::PolyRing;
use congruence_core::problem::parse_map;
use congruence_core::Dvr;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    let o = Dvr::p_adic(3).unwrap();
    let source = PolyRing::new(o.clone(), vec!["x".into(), "y".into()]).unwrap();
    let target = PolyRing::new(o, vec!["x".into()]).unwrap();
    if let Ok(m) = parse_map(&source, &target, s) {
        assert_eq!(m.images.len(), 2);
    }
});
