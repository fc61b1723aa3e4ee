#![no_main]

use libfuzzer_sys::fuzz_target;
use surgec::mapper::QubitMap;

fuzz_target!(|data: &str| {
    if let Ok(m) = QubitMap::parse(data) {
        assert_eq!(QubitMap::parse(&m.to_json()).expect("round trip"), m);
    }
});
