#![no_main]

use libfuzzer_sys::fuzz_target;
use spalab::io::parse_decomposition;

fuzz_target!(|data: &str| {
    let _ = parse_decomposition(data);
});
