#![no_main]

use disambig_core::rulelang::wire::{parse_task, task_to_json};
use disambig_core::rulelang::validate_task;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(t) = parse_task(s) {
        let _ = validate_task(&t);
        let again = parse_task(&task_to_json(&t)).expect("re-encoded task must parse");
        assert_eq!(again, t);
    }
});
