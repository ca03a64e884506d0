#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(x) = qcorr_cli::parse_angle(s) {
            assert!(x.is_finite());
        }
    }
});
