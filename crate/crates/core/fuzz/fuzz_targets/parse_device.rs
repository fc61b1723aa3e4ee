#![no_main]

use libfuzzer_sys::fuzz_target;
use surgec::device::DeviceSpec;

fuzz_target!(|data: &str| {
    if let Ok(spec) = DeviceSpec::parse(data) {
        assert_eq!(
            DeviceSpec::parse(&spec.to_json()).expect("round trip"),
            spec
        );
    }
});
