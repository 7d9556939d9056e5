#![no_main]

use entropy_perturb::ComplexMatrix;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = ComplexMatrix::from_json(text) {
        let again = ComplexMatrix::from_json(&m.to_json()).expect("serialized matrix parses");
        assert_eq!(again, m);
    }
});
