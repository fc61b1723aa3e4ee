#![no_main]

use libfuzzer_sys::fuzz_target;
use surgec::ir::{parse_circuit, CircuitDocument};

fuzz_target!(|data: &str| {
    if let Ok(dag) = parse_circuit(data) {
        let doc = dag.to_document();
        let again = CircuitDocument::parse(&doc.to_json()).expect("emitted document parses");
        assert_eq!(again, doc);
    }
});
