#![no_main]

use libfuzzer_sys::fuzz_target;
use spa_lab::reproduce::Manifest;

fuzz_target!(|data: &str| {
    let _ = Manifest::parse(data);
});
