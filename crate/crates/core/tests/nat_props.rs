mod common;

use common::gen::{check_nat_term, nat_env, nat_term};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn normal_forms_are_stable_and_keep_their_value(t in nat_term(), env in nat_env()) {
        if let Err(e) = check_nat_term(&t, &env) {
            prop_assert!(false, "{}", e);
        }
    }
}
