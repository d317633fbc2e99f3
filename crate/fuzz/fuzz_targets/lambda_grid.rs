#![no_main]

use libfuzzer_sys::fuzz_target;
use synclattice_cli::config::parse_lambda_grid;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(grid) = parse_lambda_grid(text) {
            assert!(grid.windows(2).all(|w| w[0] < w[1]));
            assert!(grid.iter().all(|l| l.is_finite() && *l >= 0.0));
        }
    }
});
