mod common;

use common::suites;

#[test]
fn shipped_rules_preserve_meaning() {
    match suites::rule_soundness(11) {
        Ok(s) => println!("{s}"),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn translation_agrees_with_the_functional_evaluator() {
    match suites::translation_soundness(12) {
        Ok(s) => println!("{s}"),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn emitted_code_agrees_with_the_store_evaluator() {
    match suites::codegen_soundness(13) {
        Ok(s) => println!("{s}"),
        Err(e) => panic!("{e}"),
    }
}
