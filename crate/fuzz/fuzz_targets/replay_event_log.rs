#![no_main]

use disambig_service::store::{parse_log, replay};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok((records, intact)) = parse_log("fuzz", text) else { return };
    assert!(intact <= text.len());
    // Keep the engine work bounded; large hypotheses are not parser bugs.
    if text.len() > 64 * 1024 {
        return;
    }
    let _ = replay("fuzz", &records);
});
