#![no_main]

use libfuzzer_sys::fuzz_target;

use floercone::cone::{self, ConeParams, Flavor};
use floercone::knot::parse_knot_complex;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(complex) = parse_knot_complex(text) else {
        return;
    };
    // parsing succeeded: everything downstream must be panic-free
    let report = complex.validate();
    let _ = complex.genus();
    let _ = complex.hat_knot_floer_dims();
    if report.is_valid() && complex.generator_count() <= 12 && complex.genus() <= 4 {
        for n in 1..=2 {
            let Ok(params) = ConeParams::new(n, 0, Flavor::Hat) else {
                continue;
            };
            if let Ok(c) = cone::build_cone(&complex, &params) {
                let _ = c.underlying.homology_by_maslov(|_, _| true);
            }
            let _ = cone::check_top_injectivity(&complex, n);
        }
    }
});
