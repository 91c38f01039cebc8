#![no_main]

use libfuzzer_sys::fuzz_target;
use vmfcorr_cli::parse_table_json;

fuzz_target!(|data: &str| {
    if let Ok(table) = parse_table_json(data) {
        let again = parse_table_json(&table.to_json()).expect("emitted JSON re-parses");
        assert_eq!(again, table);
        let _ = table.to_csv();
    }
});
