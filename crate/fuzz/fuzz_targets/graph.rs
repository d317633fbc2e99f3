#![no_main]

use libfuzzer_sys::fuzz_target;
use synclattice_cli::config::{parse_edges, parse_graph_spec};

fuzz_target!(|data: &[u8]| {
    if let Some((&n, rest)) = data.split_first() {
        if let Ok(text) = std::str::from_utf8(rest) {
            let n = usize::from(n % 32) + 1;
            let _ = parse_graph_spec(text, n);
            let _ = parse_edges(text, n, false);
            let _ = parse_edges(text, n, true);
        }
    }
});
