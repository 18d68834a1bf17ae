#![no_main]
use libfuzzer_sys::fuzz_target;
use mixmoment::io::{parse_maass, serialize_maass};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(forms) = parse_maass(text, "fuzz") {
        let written = serialize_maass(&forms);
        let back = parse_maass(&written, "fuzz").expect("serialized forms parse");
        assert_eq!(back, forms);
        assert_eq!(serialize_maass(&back), written);
    }
});
