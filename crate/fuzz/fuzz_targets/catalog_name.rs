#![no_main]

use libfuzzer_sys::fuzz_target;
use torus_cpi::CatalogName;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(name) = text.parse::<CatalogName>() {
        // anything accepted prints back to an equal name
        let again: CatalogName = name.to_string().parse().expect("display output parses");
        assert_eq!(again, name);
    }
});
