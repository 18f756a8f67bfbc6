#![no_main]

use libfuzzer_sys::fuzz_target;
use spalab::io::parse_matrix;
use spalab::maps::decomposable_from_q;

fuzz_target!(|data: &str| {
    // A parsed Q must survive the partial transpose whatever its dims.
    if let Ok(q) = parse_matrix(data) {
        let _ = decomposable_from_q(&q);
    }
});
