#![no_main]

use clap::Parser;
use libfuzzer_sys::fuzz_target;
use spa_lab::args::{parse_dims, Cli};

fuzz_target!(|data: &str| {
    let _ = parse_dims(data);
    let argv = std::iter::once("spa-lab").chain(data.split_whitespace());
    let _ = Cli::try_parse_from(argv);
});
