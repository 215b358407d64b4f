#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rows) = fraclap::io::parse_table_csv(text) {
        // accepted tables contain only finite samples and survive a
        // render/parse round trip bit-exactly
        let mut rendered = String::from("x,u\n");
        for (x, v) in &rows {
            assert!(x.is_finite() && v.is_finite());
            rendered.push_str(&fraclap::io::format_sci(*x));
            rendered.push(',');
            rendered.push_str(&fraclap::io::format_sci(*v));
            rendered.push('\n');
        }
        let reparsed = fraclap::io::parse_table_csv(&rendered).expect("rendered table parses");
        assert_eq!(rows, reparsed);
    }
});
