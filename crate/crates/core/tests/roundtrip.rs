mod common;

#[test]
fn random_programs_survive_printing_and_parsing() {
    match common::gen::program_round_trips(0x5eed, 300) {
        Ok(n) => assert!(n >= 200),
        Err(e) => panic!("{e}"),
    }
}
