#![no_main]

use disambig_core::rulelang::wire::{parse_program, program_to_json};
use disambig_core::rulelang::Schema;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let schema = Schema::with_objects(2);
    if let Ok(p) = parse_program(s, &schema) {
        assert_eq!(parse_program(&program_to_json(&p, &schema), &schema).unwrap(), p);
        let sig = schema.signature();
        for m in disambig_core::logic::Model::all_inputs(&sig).iter().take(16) {
            let _ = p.eval(m, &sig);
        }
    }
});
