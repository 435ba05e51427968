#![no_main]

use einstein4::curvops::decompose;
use einstein4::io::parse_operator_json;
use einstein4::secsign::{certify_sec_sign, CertifyConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(op) = parse_operator_json(text) else {
        return;
    };
    // Anything that parses must survive the pipeline without panicking.
    if decompose(&op).is_ok() {
        let config = CertifyConfig {
            restarts: 1,
            grid_size: 4,
            ..CertifyConfig::default()
        };
        let _ = certify_sec_sign(&op, &config);
    }
});
