#![no_main]

use libfuzzer_sys::fuzz_target;
use synclattice_cli::config::parse_blocks;

// First byte picks the node count.
fuzz_target!(|data: &[u8]| {
    if let Some((&n, rest)) = data.split_first() {
        if let Ok(text) = std::str::from_utf8(rest) {
            if let Ok(p) = parse_blocks(text, usize::from(n % 16) + 1) {
                assert_eq!(parse_blocks(&p.to_string(), p.n_nodes()).unwrap(), p);
            }
        }
    }
});
