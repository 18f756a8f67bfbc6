#![no_main]

use libfuzzer_sys::fuzz_target;
use spalab::io::parse_matrix;

fuzz_target!(|data: &str| {
    let _ = parse_matrix(data);
});
