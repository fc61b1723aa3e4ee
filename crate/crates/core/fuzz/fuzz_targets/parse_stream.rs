#![no_main]

use libfuzzer_sys::fuzz_target;
use surgec::router::{parse_stream, write_stream};

fuzz_target!(|data: &str| {
    if let Ok(s) = parse_stream(data) {
        assert_eq!(parse_stream(&write_stream(&s)).expect("round trip"), s);
    }
});
