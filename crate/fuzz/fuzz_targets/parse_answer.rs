#![no_main]

use disambig_core::render::RenderedQuery;
use libfuzzer_sys::fuzz_target;

// First line: a rendered query as JSON. Rest: the submitted letter.
fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let (query, letter) = s.split_once('\n').unwrap_or((s, "a"));
    let Ok(q) = serde_json::from_str::<RenderedQuery>(query) else { return };
    if let Some(i) = q.option_index(letter) {
        assert!(i < q.options.len());
    }
});
