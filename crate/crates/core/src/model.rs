//! Parameter space, configuration presets, initial conditions and the
//! 27-slot moment state.
//!
//! Every quantity is dimensionless: rates and couplings are measured in
//! units of the common detuning, and time is the product of that detuning
//! with laboratory time.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::ModelError;

/// Bosonic mode: the driven ensemble (A), the undriven ensemble (B) or the
/// cavity field (C).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    A,
    B,
    C,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::A, Mode::B, Mode::C];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Mode::A => "A",
            Mode::B => "B",
            Mode::C => "C",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Placement of the (driven, undriven) ensembles relative to the cavity
/// standing wave: Antinode or Node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConfigurationLabel {
    AA,
    AN,
    NA,
    NN,
}

impl ConfigurationLabel {
    /// Column order used by the sign matrix.
    pub const ALL: [ConfigurationLabel; 4] = [
        ConfigurationLabel::AN,
        ConfigurationLabel::NA,
        ConfigurationLabel::AA,
        ConfigurationLabel::NN,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConfigurationLabel::AA => "AA",
            ConfigurationLabel::AN => "AN",
            ConfigurationLabel::NA => "NA",
            ConfigurationLabel::NN => "NN",
        }
    }
}

impl fmt::Display for ConfigurationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConfigurationLabel {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "AA" => Ok(ConfigurationLabel::AA),
            "AN" => Ok(ConfigurationLabel::AN),
            "NA" => Ok(ConfigurationLabel::NA),
            "NN" => Ok(ConfigurationLabel::NN),
            _ => Err(ModelError::UnknownConfiguration(s.trim().to_string())),
        }
    }
}

/// Dimensionless model constants.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct SystemParams {
    pub delta_a: f64,
    pub delta_b: f64,
    pub delta_c: f64,
    /// Collective coupling of ensemble A to the cavity.
    pub g_a: f64,
    /// Collective coupling of ensemble B to the cavity.
    pub g_b: f64,
    /// Classical drive strength on ensemble A.
    pub chi: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub gamma_c: f64,
    /// Bath thermal occupations.
    pub n_a: f64,
    pub n_b: f64,
    pub n_c: f64,
}

impl SystemParams {
    /// `(name, value)` for every field, in configuration-file key order.
    pub fn fields(&self) -> [(&'static str, f64); 12] {
        [
            ("delta_a", self.delta_a),
            ("delta_b", self.delta_b),
            ("delta_c", self.delta_c),
            ("g_a", self.g_a),
            ("g_b", self.g_b),
            ("chi", self.chi),
            ("gamma_a", self.gamma_a),
            ("gamma_b", self.gamma_b),
            ("gamma_c", self.gamma_c),
            ("n_a", self.n_a),
            ("n_b", self.n_b),
            ("n_c", self.n_c),
        ]
    }

    pub fn field_mut(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "delta_a" => &mut self.delta_a,
            "delta_b" => &mut self.delta_b,
            "delta_c" => &mut self.delta_c,
            "g_a" => &mut self.g_a,
            "g_b" => &mut self.g_b,
            "chi" => &mut self.chi,
            "gamma_a" => &mut self.gamma_a,
            "gamma_b" => &mut self.gamma_b,
            "gamma_c" => &mut self.gamma_c,
            "n_a" => &mut self.n_a,
            "n_b" => &mut self.n_b,
            "n_c" => &mut self.n_c,
            _ => return None,
        })
    }

    pub fn detuning(&self, mode: Mode) -> f64 {
        match mode {
            Mode::A => self.delta_a,
            Mode::B => self.delta_b,
            Mode::C => self.delta_c,
        }
    }

    pub fn decay(&self, mode: Mode) -> f64 {
        match mode {
            Mode::A => self.gamma_a,
            Mode::B => self.gamma_b,
            Mode::C => self.gamma_c,
        }
    }

    pub fn bath_occupation(&self, mode: Mode) -> f64 {
        match mode {
            Mode::A => self.n_a,
            Mode::B => self.n_b,
            Mode::C => self.n_c,
        }
    }

    pub fn with_chi(mut self, chi: f64) -> Self {
        self.chi = chi;
        self
    }
}

/// Violated parameter constraints, one message per violation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamReport {
    pub violations: Vec<String>,
}

impl fmt::Display for ParamReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.violations.join("; "))
    }
}

impl std::error::Error for ParamReport {}

/// Parameter set for one ensemble placement with vacuum baths and unit
/// common detuning.
pub fn preset_params(config: ConfigurationLabel, chi: f64) -> SystemParams {
    const ANTINODE: (f64, f64) = (0.2, 2.0);
    const NODE: (f64, f64) = (0.02, 0.2);
    let ((g_a, gamma_a), (g_b, gamma_b)) = match config {
        ConfigurationLabel::AA => (ANTINODE, ANTINODE),
        ConfigurationLabel::AN => (ANTINODE, NODE),
        ConfigurationLabel::NA => (NODE, ANTINODE),
        ConfigurationLabel::NN => (NODE, NODE),
    };
    SystemParams {
        delta_a: 1.0,
        delta_b: 1.0,
        delta_c: 1.0,
        g_a,
        g_b,
        chi,
        gamma_a,
        gamma_b,
        gamma_c: 0.2,
        n_a: 0.0,
        n_b: 0.0,
        n_c: 0.0,
    }
}

pub fn validate_params(p: &SystemParams) -> Result<(), ParamReport> {
    let mut violations = Vec::new();
    for (name, value) in p.fields() {
        if !value.is_finite() {
            violations.push(format!("{name} must be finite"));
        }
    }
    let nonneg = [
        ("gamma_a", p.gamma_a),
        ("gamma_b", p.gamma_b),
        ("gamma_c", p.gamma_c),
        ("n_a", p.n_a),
        ("n_b", p.n_b),
        ("n_c", p.n_c),
    ];
    for (name, value) in nonneg {
        if value < 0.0 {
            violations.push(format!("{name} must be ≥ 0"));
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(ParamReport { violations })
    }
}

/// One slot of the moment state. The discriminant is the storage index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Moment {
    A,
    B,
    C,
    Ad,
    Bd,
    Cd,
    AA,
    BB,
    CC,
    AdAd,
    BdBd,
    CdCd,
    AdA,
    BdB,
    CdC,
    AB,
    ABd,
    AdB,
    AdBd,
    BC,
    BCd,
    BdC,
    BdCd,
    AC,
    ACd,
    AdC,
    AdCd,
}

pub const MOMENT_COUNT: usize = 27;

impl Moment {
    pub const ALL: [Moment; MOMENT_COUNT] = [
        Moment::A,
        Moment::B,
        Moment::C,
        Moment::Ad,
        Moment::Bd,
        Moment::Cd,
        Moment::AA,
        Moment::BB,
        Moment::CC,
        Moment::AdAd,
        Moment::BdBd,
        Moment::CdCd,
        Moment::AdA,
        Moment::BdB,
        Moment::CdC,
        Moment::AB,
        Moment::ABd,
        Moment::AdB,
        Moment::AdBd,
        Moment::BC,
        Moment::BCd,
        Moment::BdC,
        Moment::BdCd,
        Moment::AC,
        Moment::ACd,
        Moment::AdC,
        Moment::AdCd,
    ];

    /// The twelve (slot, conjugate slot) pairs; occupations are self-conjugate.
    pub const CONJUGATE_PAIRS: [(Moment, Moment); 12] = [
        (Moment::A, Moment::Ad),
        (Moment::B, Moment::Bd),
        (Moment::C, Moment::Cd),
        (Moment::AA, Moment::AdAd),
        (Moment::BB, Moment::BdBd),
        (Moment::CC, Moment::CdCd),
        (Moment::AB, Moment::AdBd),
        (Moment::ABd, Moment::AdB),
        (Moment::BC, Moment::BdCd),
        (Moment::BCd, Moment::BdC),
        (Moment::AC, Moment::AdCd),
        (Moment::ACd, Moment::AdC),
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Column stem used in CSV output, e.g. `AdB` for ⟨A†B⟩.
    pub fn name(self) -> &'static str {
        match self {
            Moment::A => "A",
            Moment::B => "B",
            Moment::C => "C",
            Moment::Ad => "Ad",
            Moment::Bd => "Bd",
            Moment::Cd => "Cd",
            Moment::AA => "AA",
            Moment::BB => "BB",
            Moment::CC => "CC",
            Moment::AdAd => "AdAd",
            Moment::BdBd => "BdBd",
            Moment::CdCd => "CdCd",
            Moment::AdA => "AdA",
            Moment::BdB => "BdB",
            Moment::CdC => "CdC",
            Moment::AB => "AB",
            Moment::ABd => "ABd",
            Moment::AdB => "AdB",
            Moment::AdBd => "AdBd",
            Moment::BC => "BC",
            Moment::BCd => "BCd",
            Moment::BdC => "BdC",
            Moment::BdCd => "BdCd",
            Moment::AC => "AC",
            Moment::ACd => "ACd",
            Moment::AdC => "AdC",
            Moment::AdCd => "AdCd",
        }
    }

    pub fn conjugate(self) -> Moment {
        if let Some(&(_, c)) = Self::CONJUGATE_PAIRS.iter().find(|(m, _)| *m == self) {
            return c;
        }
        if let Some(&(m, _)) = Self::CONJUGATE_PAIRS.iter().find(|(_, c)| *c == self) {
            return m;
        }
        self
    }

    /// Whether the slot is quadratic in the ladder operators.
    pub fn is_second_order(self) -> bool {
        self.index() >= 6
    }

    /// Net number of annihilators minus creators of `mode` in this slot;
    /// the slot picks up `e^{i k θ}` when that mode is rotated by θ.
    pub fn phase_weight(self, mode: Mode) -> i32 {
        let name = self.name().as_bytes();
        let target = mode.label().as_bytes()[0];
        let mut k = 0;
        let mut i = 0;
        while i < name.len() {
            let daggered = name.get(i + 1) == Some(&b'd');
            if name[i] == target {
                k += if daggered { -1 } else { 1 };
            }
            i += if daggered { 2 } else { 1 };
        }
        k
    }
}

/// The 27 complex expectation values tracked by the moment equations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentState(pub [Complex64; MOMENT_COUNT]);

impl Default for MomentState {
    fn default() -> Self {
        Self::zero()
    }
}

impl MomentState {
    pub fn zero() -> Self {
        MomentState([Complex64::new(0.0, 0.0); MOMENT_COUNT])
    }

    pub fn from_slice(values: &[Complex64]) -> Option<Self> {
        let arr: [Complex64; MOMENT_COUNT] = values.try_into().ok()?;
        Some(MomentState(arr))
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn occupation(&self, mode: Mode) -> Complex64 {
        match mode {
            Mode::A => self[Moment::AdA],
            Mode::B => self[Moment::BdB],
            Mode::C => self[Moment::CdC],
        }
    }

    pub fn total_excitation(&self) -> f64 {
        Mode::ALL.iter().map(|&m| self.occupation(m).re).sum()
    }

    /// Largest |⟨X⟩ − conj⟨X†⟩| over the twelve conjugate pairs.
    pub fn conjugate_mismatch(&self) -> f64 {
        Moment::CONJUGATE_PAIRS
            .iter()
            .map(|&(m, c)| (self[m] - self[c].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Largest imaginary part among the three occupations.
    pub fn occupation_imaginary_residue(&self) -> f64 {
        Mode::ALL
            .iter()
            .map(|&m| self.occupation(m).im.abs())
            .fold(0.0, f64::max)
    }

    /// Rotates `mode` by `e^{iθ}`: every slot is multiplied by the phase
    /// matching its net annihilator count in that mode.
    pub fn rotate_mode(&self, mode: Mode, theta: f64) -> Self {
        let mut out = *self;
        for m in Moment::ALL {
            let k = m.phase_weight(mode);
            if k != 0 {
                out[m] *= Complex64::from_polar(1.0, k as f64 * theta);
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<Moment> for MomentState {
    type Output = Complex64;
    fn index(&self, m: Moment) -> &Complex64 {
        &self.0[m.index()]
    }
}

impl IndexMut<Moment> for MomentState {
    fn index_mut(&mut self, m: Moment) -> &mut Complex64 {
        &mut self.0[m.index()]
    }
}

/// Zero-mean, phase-insensitive initial state with the given mean
/// occupations; every coherence is zero.
pub fn initial_state(n_a0: f64, n_b0: f64, n_c0: f64) -> Result<MomentState, ModelError> {
    for (name, v) in [("init_na", n_a0), ("init_nb", n_b0), ("init_nc", n_c0)] {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(ModelError::InvalidArgument(format!(
                "{name} must be a finite value ≥ 0, got {v}"
            )));
        }
    }
    let mut s = MomentState::zero();
    s[Moment::AdA] = Complex64::new(n_a0, 0.0);
    s[Moment::BdB] = Complex64::new(n_b0, 0.0);
    s[Moment::CdC] = Complex64::new(n_c0, 0.0);
    Ok(s)
}

/// Absolute and relative local-error tolerances of the adaptive integrator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            abs: 1e-10,
            rel: 1e-9,
        }
    }
}

pub const DEFAULT_T_MAX: f64 = 10.0;
pub const DEFAULT_SAMPLES: usize = 1001;

/// One fully specified run.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub params: SystemParams,
    pub initial: MomentState,
    pub t_max: f64,
    pub sample_count: usize,
    pub tolerances: Tolerances,
}

impl Scenario {
    pub fn new(
        params: SystemParams,
        initial: MomentState,
        t_max: f64,
        sample_count: usize,
        tolerances: Tolerances,
    ) -> Result<Self, ModelError> {
        let s = Scenario {
            params,
            initial,
            t_max,
            sample_count,
            tolerances,
        };
        s.validate()?;
        Ok(s)
    }

    /// Preset parameters, unit initial occupations and default run settings.
    pub fn preset(config: ConfigurationLabel, chi: f64) -> Self {
        Scenario {
            params: preset_params(config, chi),
            initial: initial_state(1.0, 1.0, 1.0).expect("unit occupations are valid"),
            t_max: DEFAULT_T_MAX,
            sample_count: DEFAULT_SAMPLES,
            tolerances: Tolerances::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        validate_params(&self.params).map_err(ModelError::InvalidParams)?;
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return Err(ModelError::InvalidArgument(format!(
                "t_max must be > 0, got {}",
                self.t_max
            )));
        }
        if self.sample_count < 2 {
            return Err(ModelError::InvalidArgument(format!(
                "sample_count must be ≥ 2, got {}",
                self.sample_count
            )));
        }
        if !(self.tolerances.abs > 0.0) || !(self.tolerances.rel > 0.0) {
            return Err(ModelError::InvalidArgument(
                "tolerances must be > 0".to_string(),
            ));
        }
        if !self.initial.is_finite() {
            return Err(ModelError::InvalidArgument(
                "initial state must be finite".to_string(),
            ));
        }
        Ok(())
    }

    /// Equally spaced sample times covering `[0, t_max]`.
    pub fn sample_times(&self) -> Vec<f64> {
        let n = self.sample_count;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.t_max
                } else {
                    self.t_max * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_match_published_lists() {
        let an = preset_params(ConfigurationLabel::AN, 0.2);
        assert_eq!((an.g_a, an.g_b), (0.2, 0.02));
        assert_eq!((an.gamma_a, an.gamma_b, an.gamma_c), (2.0, 0.2, 0.2));
        assert_eq!(an.chi, 0.2);

        let na = preset_params(ConfigurationLabel::NA, 0.0);
        assert_eq!((na.g_a, na.g_b), (0.02, 0.2));
        assert_eq!((na.gamma_a, na.gamma_b, na.gamma_c), (0.2, 2.0, 0.2));
        assert_eq!(na.chi, 0.0);

        let nn = preset_params(ConfigurationLabel::NN, 0.2);
        assert_eq!((nn.g_a, nn.g_b), (0.02, 0.02));
        assert_eq!((nn.gamma_a, nn.gamma_b, nn.gamma_c), (0.2, 0.2, 0.2));

        let aa = preset_params(ConfigurationLabel::AA, 0.2);
        assert_eq!((aa.g_a, aa.g_b), (0.2, 0.2));
        assert_eq!((aa.gamma_a, aa.gamma_b), (2.0, 2.0));

        for cfg in ConfigurationLabel::ALL {
            let p = preset_params(cfg, 0.2);
            assert_eq!((p.delta_a, p.delta_b, p.delta_c), (1.0, 1.0, 1.0));
            assert_eq!((p.n_a, p.n_b, p.n_c), (0.0, 0.0, 0.0));
            assert!(validate_params(&p).is_ok());
        }
    }

    #[test]
    fn validation_reports_each_violation() {
        let mut p = SystemParams::default();
        assert!(validate_params(&p).is_ok());
        p.gamma_a = -1.0;
        let r = validate_params(&p).unwrap_err();
        assert_eq!(r.violations, vec!["gamma_a must be ≥ 0".to_string()]);
        p.n_a = -0.5;
        p.chi = f64::NAN;
        let r = validate_params(&p).unwrap_err();
        assert!(r.violations.contains(&"n_a must be ≥ 0".to_string()));
        assert!(r.violations.contains(&"chi must be finite".to_string()));
        assert_eq!(r.violations.len(), 3);
    }

    #[test]
    fn initial_state_layout() {
        let s = initial_state(1.0, 1.0, 1.0).unwrap();
        for m in Moment::ALL {
            let expected = matches!(m, Moment::AdA | Moment::BdB | Moment::CdC) as u8 as f64;
            assert_eq!(s[m], Complex64::new(expected, 0.0), "{m:?}");
        }
        assert_eq!(s.conjugate_mismatch(), 0.0);
        assert_eq!(initial_state(0.0, 0.0, 0.0).unwrap(), MomentState::zero());
        let s = initial_state(0.2, 0.2, 0.2).unwrap();
        assert_eq!(s[Moment::CdC].re, 0.2);
        assert!(matches!(
            initial_state(-1.0, 0.0, 0.0),
            Err(ModelError::InvalidArgument(_))
        ));
    }

    #[test]
    fn conjugate_table_is_an_involution() {
        for m in Moment::ALL {
            assert_eq!(m.conjugate().conjugate(), m);
            for mode in Mode::ALL {
                assert_eq!(m.conjugate().phase_weight(mode), -m.phase_weight(mode));
            }
        }
        assert_eq!(Moment::AdA.conjugate(), Moment::AdA);
        assert_eq!(Moment::ABd.phase_weight(Mode::B), -1);
        assert_eq!(Moment::AdAd.phase_weight(Mode::A), -2);
        assert_eq!(Moment::AdBd.phase_weight(Mode::C), 0);
    }

    #[test]
    fn scenario_invariants() {
        let base = Scenario::preset(ConfigurationLabel::AN, 0.0);
        assert!(base.validate().is_ok());
        let mut s = base.clone();
        s.t_max = 0.0;
        assert!(s.validate().is_err());
        let mut s = base.clone();
        s.sample_count = 1;
        assert!(s.validate().is_err());
        let mut s = base.clone();
        s.tolerances.rel = 0.0;
        assert!(s.validate().is_err());
        let times = base.sample_times();
        assert_eq!(times.len(), 1001);
        assert_eq!(times[0], 0.0);
        assert_eq!(*times.last().unwrap(), 10.0);
        assert!((times[1] - 0.01).abs() < 1e-15);
    }

    #[test]
    fn configuration_labels_parse() {
        assert_eq!(
            "an".parse::<ConfigurationLabel>().unwrap(),
            ConfigurationLabel::AN
        );
        assert!("XY".parse::<ConfigurationLabel>().is_err());
    }
}
