#![no_main]

use libfuzzer_sys::fuzz_target;
use synclattice_cli::config::parse_permutation;

fuzz_target!(|data: &[u8]| {
    if let Some((&n, rest)) = data.split_first() {
        if let Ok(text) = std::str::from_utf8(rest) {
            if let Ok(p) = parse_permutation(text, usize::from(n % 16) + 1) {
                let mut image = p.image().to_vec();
                image.sort_unstable();
                assert!(image.iter().enumerate().all(|(i, &v)| i == v));
            }
        }
    }
});
