//! CSV tables: parsing must never panic, and rendering a parsed table must
//! reach a fixed point after one round.

#![no_main]

use libfuzzer_sys::fuzz_target;
use rotorlab_cli::CsvTable;

fuzz_target!(|data: &str| {
    let Ok(table) = CsvTable::parse(data) else {
        return;
    };
    let rendered = table.render();
    let again = CsvTable::parse(&rendered).expect("rendered table parses");
    assert_eq!(again.render(), rendered);
});
