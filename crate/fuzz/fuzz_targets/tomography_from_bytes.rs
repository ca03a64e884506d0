#![no_main]

use libfuzzer_sys::fuzz_target;
use qcorr_core::expsim::tomography;
use qcorr_core::DensityMatrix;

fuzz_target!(|data: &[u8]| {
    if let Ok(counts) = qcorr_cli::decode_pauli_counts(data) {
        if let Ok(rho) = tomography(&counts) {
            assert!(DensityMatrix::new(*rho.matrix()).is_ok());
        }
    }
});
