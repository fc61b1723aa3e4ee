#![no_main]

use libfuzzer_sys::fuzz_target;
use surgec::qcb::LayoutDoc;

fuzz_target!(|data: &str| {
    if let Ok(q) = LayoutDoc::parse(data).and_then(|l| l.to_qcb()) {
        let back = LayoutDoc::from_qcb(&q)
            .to_qcb()
            .expect("emitted layout parses");
        assert_eq!(back.to_ascii(), q.to_ascii());
    }
});
