#![no_main]

use einstein4::io::{parse_point, parse_reals};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(xs) = parse_reals(text) {
        assert!(xs.iter().all(|x| x.is_finite()));
    }
    if let Ok(p) = parse_point(text) {
        assert!(p.iter().all(|x| x.is_finite()));
    }
});
