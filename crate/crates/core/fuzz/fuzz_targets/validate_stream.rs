#![no_main]

// Input: a layout document, a line holding only `---`, then a stream.

use libfuzzer_sys::fuzz_target;
use surgec::qcb::LayoutDoc;
use surgec::router::{parse_stream, validate_stream};

fuzz_target!(|data: &str| {
    let Some((layout, stream)) = data.split_once("\n---\n") else {
        return;
    };
    let (Ok(q), Ok(s)) = (
        LayoutDoc::parse(layout).and_then(|l| l.to_qcb()),
        parse_stream(stream),
    ) else {
        return;
    };
    let _ = validate_stream(&s, &q);
});
