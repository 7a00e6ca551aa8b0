//! The fuzz targets' properties on stable: replay the checked-in seeds and
//! a few hundred random strings through both parsers.

use std::fs;
use std::path::PathBuf;

use cartan::{parse_expr, Chart};
use cartan_cli::parse_config;
use proptest::prelude::*;

fn seeds(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<String> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| fs::read_to_string(e.unwrap().path()).unwrap())
        .collect();
    out.sort();
    out
}

fn expr_round_trip(text: &str) {
    let chart = Chart::spacetime();
    if let Ok(e) = parse_expr(text, &chart) {
        let printed = e.display(&chart).to_string();
        let again = parse_expr(&printed, &chart).expect("printed expression reparses");
        assert_eq!(again.simplify(), e.simplify(), "{text:?} printed as {printed:?}");
    }
}

fn config_round_trip(text: &str) {
    if let Ok(cfg) = parse_config(text) {
        let again = parse_config(&cfg.to_string()).expect("serialized config reparses");
        assert_eq!(again, cfg);
    }
}

#[test]
fn expression_seeds() {
    let s = seeds("parse_expr");
    assert!(s.len() >= 5);
    s.iter().for_each(|t| expr_round_trip(t));
}

#[test]
fn config_seeds() {
    let s = seeds("parse_config");
    assert!(s.len() >= 5);
    s.iter().for_each(|t| config_round_trip(t));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn random_expressions(text in "[xyzt0-9a-k+*/^() .,e-]{0,24}") {
        expr_round_trip(&text);
    }

    #[test]
    fn random_configs(text in "(\\[(chart|params|action|run|chain c|process p)\\]\n|(coordinates|form|field|support|battery|seed|k|shape|axes|center|radius|preset) = [a-z0-9, .^*+-]{0,12}\n|#.*\n){0,8}") {
        config_round_trip(&text);
    }
}
