#![no_main]
use std::path::Path;

use libfuzzer_sys::fuzz_target;
use mixmoment::io::Config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = Config::parse(text, Path::new("")) {
        let written = cfg.to_text();
        let back = Config::parse(&written, Path::new("")).expect("canonical config parses");
        assert_eq!(back, cfg);
        assert_eq!(back.to_text(), written);
    }
});
