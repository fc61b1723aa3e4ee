#![no_main]

use libfuzzer_sys::fuzz_target;
use surgec::ir::ExternTemplate;

fuzz_target!(|data: &str| {
    if let Ok(t) = ExternTemplate::parse(data) {
        assert_eq!(ExternTemplate::parse(&t.to_json()).expect("round trip"), t);
    }
});
