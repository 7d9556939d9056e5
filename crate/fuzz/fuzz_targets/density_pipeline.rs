#![no_main]

use entropy_perturb::spectral::DEFAULT_CLUSTER_TOL;
use entropy_perturb::{decompose, entropy_exact, validate_density, ComplexMatrix};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(m) = ComplexMatrix::from_json(text) else { return };
    if m.dim() > 16 {
        return;
    }
    let Ok(rho) = validate_density(&m, 0.0) else { return };
    let s = entropy_exact(&rho).expect("valid state has an entropy");
    assert!(s >= -1e-9 && s <= (rho.dim() as f64).ln() + 1e-9);
    let sd = decompose(&rho, DEFAULT_CLUSTER_TOL).expect("valid state decomposes");
    assert!(sd.reconstruct().max_abs_diff(rho.matrix()) < 1e-9);
});
