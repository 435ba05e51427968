#![no_main]

use einstein4::io::parse_params;
use einstein4::models::{catalog, MODEL_NAMES};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let pairs: Vec<&str> = text.split_whitespace().collect();
    if let Ok(params) = parse_params(&pairs) {
        assert!(params.values().all(|v| v.is_finite()));
        for name in MODEL_NAMES {
            let _ = catalog(name, &params);
        }
    }
});
