//! `key = value` scenario files.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{ConfigError, ModelError};
use crate::model::{
    initial_state, preset_params, ConfigurationLabel, Mode, Scenario, SystemParams, Tolerances,
    DEFAULT_SAMPLES, DEFAULT_T_MAX,
};
use crate::runner::DEFAULT_THRESHOLD;

use super::csv::format_number;

/// Parameter keys a preset fixes; setting any of them alongside `preset`
/// is an error.
pub const PRESET_OWNED_KEYS: [&str; 5] = ["g_a", "g_b", "gamma_a", "gamma_b", "gamma_c"];

const RUN_KEYS: [&str; 8] = [
    "init_na",
    "init_nb",
    "init_nc",
    "t_max",
    "samples",
    "abs_tol",
    "rel_tol",
    "threshold",
];

#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedConfig {
    pub scenario: Scenario,
    pub threshold: f64,
    pub preset: Option<ConfigurationLabel>,
}

impl ResolvedConfig {
    pub fn from_preset(config: ConfigurationLabel, chi: f64) -> Self {
        ResolvedConfig {
            scenario: Scenario::preset(config, chi),
            threshold: DEFAULT_THRESHOLD,
            preset: Some(config),
        }
    }
}

/// Parameters used when no preset is given: unit detunings, everything
/// else zero.
pub fn explicit_defaults() -> SystemParams {
    SystemParams {
        delta_a: 1.0,
        delta_b: 1.0,
        delta_c: 1.0,
        ..SystemParams::default()
    }
}

fn is_param_key(key: &str) -> bool {
    SystemParams::default()
        .fields()
        .iter()
        .any(|(k, _)| *k == key)
}

struct Entry {
    line: usize,
    value: String,
}

pub fn parse_config(text: &str) -> Result<ResolvedConfig, ConfigError> {
    let mut entries: HashMap<String, Entry> = HashMap::new();
    let mut order: Vec<String> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .filter(|(k, v)| !k.is_empty() && !v.is_empty())
            .ok_or_else(|| ConfigError::MalformedLine {
                line,
                text: raw.trim().to_string(),
            })?;
        if key != "preset" && !is_param_key(key) && !RUN_KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            });
        }
        if let Some(first) = entries.get(key) {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
                first: first.line,
            });
        }
        entries.insert(
            key.to_string(),
            Entry {
                line,
                value: value.to_string(),
            },
        );
        order.push(key.to_string());
    }

    let number = |key: &str| -> Result<Option<(f64, usize)>, ConfigError> {
        match entries.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<f64>()
                .map(|v| Some((v, e.line)))
                .map_err(|_| ConfigError::MalformedNumber {
                    line: e.line,
                    key: key.to_string(),
                    value: e.value.clone(),
                }),
        }
    };

    let preset = match entries.get("preset") {
        None => None,
        Some(e) => Some((
            e.value
                .parse::<ConfigurationLabel>()
                .map_err(|source| ConfigError::BadValue {
                    line: e.line,
                    source,
                })?,
            e.line,
        )),
    };

    let mut params = match preset {
        Some((label, preset_line)) => {
            for key in &order {
                if PRESET_OWNED_KEYS.contains(&key.as_str()) {
                    return Err(ConfigError::PresetConflict {
                        line: entries[key].line,
                        key: key.clone(),
                        preset_line,
                    });
                }
            }
            preset_params(label, 0.0)
        }
        None => explicit_defaults(),
    };
    for (name, _) in SystemParams::default().fields() {
        if let Some((v, _)) = number(name)? {
            *params.field_mut(name).expect("known field") = v;
        }
    }

    let mut init = [1.0; 3];
    for (slot, key) in ["init_na", "init_nb", "init_nc"].iter().enumerate() {
        if let Some((v, line)) = number(key)? {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(ConfigError::BadValue {
                    line,
                    source: ModelError::InvalidArgument(format!(
                        "{key} must be finite and ≥ 0, got {v}"
                    )),
                });
            }
            init[slot] = v;
        }
    }

    let t_max = number("t_max")?.map_or(DEFAULT_T_MAX, |(v, _)| v);
    let samples = match entries.get("samples") {
        None => DEFAULT_SAMPLES,
        Some(e) => e
            .value
            .parse::<usize>()
            .map_err(|_| ConfigError::MalformedNumber {
                line: e.line,
                key: "samples".into(),
                value: e.value.clone(),
            })?,
    };
    let defaults = Tolerances::default();
    let tolerances = Tolerances {
        abs: number("abs_tol")?.map_or(defaults.abs, |(v, _)| v),
        rel: number("rel_tol")?.map_or(defaults.rel, |(v, _)| v),
    };
    let threshold = match number("threshold")? {
        None => DEFAULT_THRESHOLD,
        Some((v, _)) if v > 0.0 && v.is_finite() => v,
        Some((v, line)) => {
            return Err(ConfigError::BadValue {
                line,
                source: ModelError::InvalidArgument(format!("threshold must be > 0, got {v}")),
            })
        }
    };

    let initial = initial_state(init[0], init[1], init[2]).map_err(ConfigError::Invalid)?;
    let scenario =
        Scenario::new(params, initial, t_max, samples, tolerances).map_err(ConfigError::Invalid)?;
    Ok(ResolvedConfig {
        scenario,
        threshold,
        preset: preset.map(|(label, _)| label),
    })
}

/// Writes a configuration that parses back to `config`. With a preset,
/// only the keys a preset may carry are written.
pub fn emit_config(config: &ResolvedConfig) -> String {
    let mut out = String::new();
    let s = &config.scenario;
    let fields = s.params.fields();
    match config.preset {
        Some(label) => {
            let _ = writeln!(out, "preset = {label}");
            for (k, v) in fields {
                if !PRESET_OWNED_KEYS.contains(&k) {
                    let _ = writeln!(out, "{k} = {}", format_number(v));
                }
            }
        }
        None => {
            for (k, v) in fields {
                let _ = writeln!(out, "{k} = {}", format_number(v));
            }
        }
    }
    for (key, mode) in [
        ("init_na", Mode::A),
        ("init_nb", Mode::B),
        ("init_nc", Mode::C),
    ] {
        let _ = writeln!(
            out,
            "{key} = {}",
            format_number(s.initial.occupation(mode).re)
        );
    }
    let _ = writeln!(out, "t_max = {}", format_number(s.t_max));
    let _ = writeln!(out, "samples = {}", s.sample_count);
    let _ = writeln!(out, "abs_tol = {}", format_number(s.tolerances.abs));
    let _ = writeln!(out, "rel_tol = {}", format_number(s.tolerances.rel));
    let _ = writeln!(out, "threshold = {}", format_number(config.threshold));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_with_chi_override() {
        let c = parse_config("preset = AN\nchi = 0.2").unwrap();
        assert_eq!(c.scenario, Scenario::preset(ConfigurationLabel::AN, 0.2));
        assert_eq!(c.threshold, 1e-4);
        assert_eq!(c.preset, Some(ConfigurationLabel::AN));
    }

    #[test]
    fn preset_conflicts_with_decay() {
        let err = parse_config("preset = AA\ngamma_a = 1").unwrap_err();
        assert_eq!(
            err,
            ConfigError::PresetConflict {
                line: 2,
                key: "gamma_a".into(),
                preset_line: 1
            }
        );
    }

    #[test]
    fn explicit_spelling_matches_preset() {
        let explicit = parse_config(
            "g_a = 0.2\ng_b = 0.02\ngamma_a = 2\ngamma_b = 0.2\ngamma_c = 0.2\nchi = 0",
        )
        .unwrap();
        let preset = parse_config("preset = AN\nchi = 0").unwrap();
        assert_eq!(explicit.scenario, preset.scenario);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(
            parse_config("# c\nfoo = 1").unwrap_err(),
            ConfigError::UnknownKey {
                line: 2,
                key: "foo".into()
            }
        );
        assert_eq!(
            parse_config("chi = 1\n\nchi = 2").unwrap_err(),
            ConfigError::DuplicateKey {
                line: 3,
                key: "chi".into(),
                first: 1
            }
        );
        assert!(matches!(
            parse_config("chi = abc").unwrap_err(),
            ConfigError::MalformedNumber { line: 1, .. }
        ));
        assert!(matches!(
            parse_config("samples = 2.5").unwrap_err(),
            ConfigError::MalformedNumber { line: 1, .. }
        ));
        assert!(matches!(
            parse_config("\n\njust text").unwrap_err(),
            ConfigError::MalformedLine { line: 3, .. }
        ));
        assert!(matches!(
            parse_config("preset = XY").unwrap_err(),
            ConfigError::BadValue { line: 1, .. }
        ));
        assert!(matches!(
            parse_config("init_na = -1").unwrap_err(),
            ConfigError::BadValue { line: 1, .. }
        ));
        assert!(matches!(
            parse_config("threshold = 0").unwrap_err(),
            ConfigError::BadValue { line: 1, .. }
        ));
        assert!(matches!(
            parse_config("gamma_b = -1").unwrap_err(),
            ConfigError::Invalid(_)
        ));
    }

    #[test]
    fn comments_and_defaults() {
        let c = parse_config("  # only a comment\n\ng_a = 0.5  # trailing\n").unwrap();
        assert_eq!(c.scenario.params.g_a, 0.5);
        assert_eq!(c.scenario.params.delta_b, 1.0);
        assert_eq!(c.scenario.params.gamma_c, 0.0);
        assert_eq!(c.scenario.t_max, 10.0);
        assert_eq!(c.scenario.sample_count, 1001);
        assert_eq!(c.scenario.tolerances, Tolerances::default());
        assert_eq!(c.scenario.initial, initial_state(1.0, 1.0, 1.0).unwrap());
        assert_eq!(c.preset, None);
    }

    #[test]
    fn preset_may_override_detuning_and_bath() {
        let c = parse_config("preset = NN\ndelta_c = 0.5\nn_b = 0.1").unwrap();
        assert_eq!(c.scenario.params.delta_c, 0.5);
        assert_eq!(c.scenario.params.n_b, 0.1);
        assert_eq!(c.scenario.params.g_a, 0.02);
    }

    #[test]
    fn emit_round_trip() {
        for text in [
            "preset = NA\nchi = 0.2\ninit_nb = 0.3\nsamples = 11\nthreshold = 1e-3",
            "g_a = 0.1\ng_b = 0.123456789012345\ngamma_c = 1e-7\nt_max = 3.5\nrel_tol = 1e-11",
        ] {
            let first = parse_config(text).unwrap();
            let echo = emit_config(&first);
            let second = parse_config(&echo).unwrap();
            assert_eq!(first, second);
            assert_eq!(emit_config(&second), echo);
        }
    }
}
