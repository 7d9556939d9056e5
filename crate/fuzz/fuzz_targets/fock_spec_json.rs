#![no_main]

use entropy_perturb::cv::{onemode_perturbation, onemode_state, FockStateSpec};
use entropy_perturb::{entropy_series, SeriesOptions};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = FockStateSpec::from_json(text) else { return };
    assert_eq!(FockStateSpec::from_json(&spec.to_json()).ok(), Some(spec));
    if spec.dim > 64 {
        return;
    }
    if let (Ok(rho), Ok(h)) = (onemode_state(&spec), onemode_perturbation(&spec)) {
        let _ = entropy_series(&rho, &h, 2, &SeriesOptions::default());
    }
});
