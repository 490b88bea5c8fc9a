#![no_main]

use disambig_core::rulelang::wire::{model_to_value, parse_model};
use disambig_core::rulelang::Schema;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let schema = Schema::with_objects(3);
    if let Ok(m) = parse_model(s, &schema) {
        assert_eq!(parse_model(&model_to_value(&m, &schema).to_string(), &schema).unwrap(), m);
    }
});
