#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // Must never panic; on success every key is non-empty and free of
    // whitespace, which is what the CLI flag injection relies on.
    if let Ok(pairs) = fraclap::io::parse_config(text) {
        for (key, _) in &pairs {
            assert!(!key.is_empty());
            assert!(!key.contains(char::is_whitespace));
        }
    }
});
