#![no_main]

use disambig_core::rulelang::wire::{parse_schema, schema_to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(schema) = parse_schema(s) {
        assert_eq!(parse_schema(&schema_to_json(&schema)).unwrap(), schema);
    }
});
