#![no_main]

use cartan::{parse_expr, Chart};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let chart = Chart::spacetime();
    if let Ok(e) = parse_expr(text, &chart) {
        // Whatever parses must print to something that parses back to the same value.
        let printed = e.display(&chart).to_string();
        let again = parse_expr(&printed, &chart).expect("printed expression reparses");
        assert_eq!(again.simplify(), e.simplify(), "{text:?} printed as {printed:?}");
    }
});
