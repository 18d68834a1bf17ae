#![no_main]
use libfuzzer_sys::fuzz_target;
use mixmoment::io::CsvTable;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(table) = CsvTable::parse(text) {
        let written = table.to_csv();
        assert_eq!(CsvTable::parse(&written).expect("written table parses"), table);
    }
});
