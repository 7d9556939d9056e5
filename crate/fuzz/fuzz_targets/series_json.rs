#![no_main]

use entropy_perturb::PerturbationSeries;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(ps) = PerturbationSeries::from_json(text) {
        assert!(ps.max_order() >= 1);
        let back = PerturbationSeries::from_json(&ps.to_json()).expect("serialized series parses");
        assert_eq!(back.max_order(), ps.max_order());
        let _ = ps.fold(0.5);
    }
});
