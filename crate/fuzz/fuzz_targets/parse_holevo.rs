#![no_main]

use libfuzzer_sys::fuzz_target;
use spalab::io::parse_holevo;

fuzz_target!(|data: &str| {
    let _ = parse_holevo(data);
});
