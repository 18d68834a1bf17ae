#![no_main]
use libfuzzer_sys::fuzz_target;
use mixmoment::modforms::parse_eigenform;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(parsed) = parse_eigenform(text) {
        let mut written = format!("weight={} dim={}\n", parsed.weight, parsed.dim);
        for (n, v) in &parsed.lambdas {
            written.push_str(&format!("lambda {n} {v:e}\n"));
        }
        assert_eq!(parse_eigenform(&written).expect("canonical text parses"), parsed);
    }
});
