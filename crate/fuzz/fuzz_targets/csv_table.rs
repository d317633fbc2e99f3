#![no_main]

use libfuzzer_sys::fuzz_target;
use synclattice_cli::table::Table;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(table) = Table::parse(text) {
            assert!(table.rows.iter().all(|r| r.len() == table.header.len()));
        }
    }
});
