#![no_main]

use libfuzzer_sys::fuzz_target;
use rotorlab_cli::CsvTable;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // Same text both as a whole file and as a bare header block.
    let wrapped: String = text.lines().map(|l| format!("# {l}\n")).collect::<String>() + "x\n";
    for input in [text, wrapped.as_str()] {
        if let Ok(table) = CsvTable::parse(input) {
            let _ = table.annotation("plateau");
            if let Ok(config) = table.config() {
                if let Some(command) = config.command {
                    let _ = config.resolve(command);
                }
            }
        }
    }
});
