#![no_main]

use einstein4::geography::{read_points_csv, report};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(points) = read_points_csv(data) {
        for p in points {
            let r = report(p);
            assert_eq!(r.c1sq, 2 * i128::from(p.chi) + 3 * i128::from(p.tau));
        }
    }
});
