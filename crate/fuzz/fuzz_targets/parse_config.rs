#![no_main]

use cartan_cli::parse_config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = parse_config(text) {
        let printed = cfg.to_string();
        let again = parse_config(&printed).expect("serialized config reparses");
        assert_eq!(again, cfg);
    }
});
