use ensemble_cavity::io::config::{emit_config, parse_config};
use ensemble_cavity::model::ConfigurationLabel;
use proptest::prelude::*;

fn label() -> impl Strategy<Value = Option<ConfigurationLabel>> {
    prop_oneof![
        Just(None),
        proptest::sample::select(ConfigurationLabel::ALL.to_vec()).prop_map(Some),
    ]
}

proptest! {
    #[test]
    fn emitted_config_parses_back(
        preset in label(),
        chi in -1.0f64..1.0,
        g in 0.0f64..1.0,
        gamma in 0.0f64..3.0,
        delta in -2.0f64..2.0,
        bath in 0.0f64..0.5,
        init in proptest::array::uniform3(0.0f64..2.0),
        t_max in 0.1f64..50.0,
        samples in 2usize..5000,
        threshold in 1e-8f64..1e-2,
    ) {
        let mut text = String::new();
        match preset {
            Some(l) => text.push_str(&format!("preset = {l}\n")),
            None => text.push_str(&format!("g_a = {g}\ngamma_b = {gamma}\n")),
        }
        text.push_str(&format!(
            "chi = {chi}\ndelta_c = {delta}\nn_a = {bath}\ninit_na = {}\ninit_nb = {}\ninit_nc = {}\n",
            init[0], init[1], init[2]
        ));
        text.push_str(&format!("t_max = {t_max}\nsamples = {samples}\nthreshold = {threshold}\n"));
        let first = parse_config(&text).unwrap();
        let echo = emit_config(&first);
        let second = parse_config(&echo).unwrap();
        prop_assert_eq!(&first, &second);
        prop_assert_eq!(emit_config(&second), echo);
    }
}
