//! Nonclassicality witnesses evaluated on a single set of correlators.
//!
//! Each function is generic over [`Correlators`], so the same formulas run
//! on decoupled moment data and on exact Fock-space expectations.
//! Every witness is real for Hermitian-consistent data; an imaginary
//! residue above [`IMAG_TOLERANCE`] is reported as an error instead of
//! being silently discarded.

use std::fmt;

use num_complex::Complex64;

use crate::closure::{Correlators, OperatorFactor};
use crate::error::WitnessError;
use crate::model::Mode;

pub const IMAG_TOLERANCE: f64 = 1e-10;

/// Occupations below this make the Mandel parameter undefined.
pub const MANDEL_MIN_OCCUPATION: f64 = 1e-12;

/// Boundary below which a quadrature variance signals squeezing.
pub const COHERENT_VARIANCE: f64 = 0.25;

/// Unordered mode pair, in sign-matrix order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pair {
    AB,
    BC,
    AC,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::AB, Pair::BC, Pair::AC];

    pub fn modes(self) -> (Mode, Mode) {
        match self {
            Pair::AB => (Mode::A, Mode::B),
            Pair::BC => (Mode::B, Mode::C),
            Pair::AC => (Mode::A, Mode::C),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Pair::AB => "AB",
            Pair::BC => "BC",
            Pair::AC => "AC",
        }
    }
}

/// Ordered pair for steering; the first mode is the steering party.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OrderedPair(pub Mode, pub Mode);

impl OrderedPair {
    pub const ALL: [OrderedPair; 6] = [
        OrderedPair(Mode::A, Mode::B),
        OrderedPair(Mode::B, Mode::A),
        OrderedPair(Mode::B, Mode::C),
        OrderedPair(Mode::C, Mode::B),
        OrderedPair(Mode::A, Mode::C),
        OrderedPair(Mode::C, Mode::A),
    ];

    pub fn label(self) -> String {
        format!("{}{}", self.0, self.1)
    }
}

/// Bipartition `ab|c` of the three modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Partition {
    AbC,
    BcA,
    AcB,
}

impl Partition {
    pub const ALL: [Partition; 3] = [Partition::AbC, Partition::BcA, Partition::AcB];

    /// (first, second, separated) modes.
    pub fn modes(self) -> (Mode, Mode, Mode) {
        match self {
            Partition::AbC => (Mode::A, Mode::B, Mode::C),
            Partition::BcA => (Mode::B, Mode::C, Mode::A),
            Partition::AcB => (Mode::A, Mode::C, Mode::B),
        }
    }

    /// Label usable in CSV column names, e.g. `AB_C`.
    pub fn label(self) -> &'static str {
        match self {
            Partition::AbC => "AB_C",
            Partition::BcA => "BC_A",
            Partition::AcB => "AC_B",
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b, c) = self.modes();
        write!(f, "{a}{b}|{c}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadratures {
    /// (ΔX)²
    pub x: f64,
    /// (ΔY)²
    pub y: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HilleryZubairy {
    /// ⟨a†a b†b⟩ − |⟨ab†⟩|²
    pub e: f64,
    /// ⟨a†a⟩⟨b†b⟩ − |⟨ab⟩|²
    pub e_tilde: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Biseparability {
    /// ⟨a†a b†b c†c⟩ − |⟨abc†⟩|²
    pub e: f64,
    /// ⟨a†a b†b⟩⟨c†c⟩ − |⟨abc⟩|²
    pub e_prime: f64,
}

fn real(witness: impl FnOnce() -> String, z: Complex64) -> Result<f64, WitnessError> {
    if z.im.abs() > IMAG_TOLERANCE {
        return Err(WitnessError::ImaginaryResidue {
            witness: witness(),
            residue: z.im.abs(),
        });
    }
    Ok(z.re)
}

fn occupation<S: Correlators + ?Sized>(src: &S, mode: Mode) -> Result<f64, WitnessError> {
    real(|| format!("occupation_{mode}"), src.occupation(mode))
}

fn ann(m: Mode) -> OperatorFactor {
    OperatorFactor::ann(m)
}

fn cre(m: Mode) -> OperatorFactor {
    OperatorFactor::cre(m)
}

/// ⟨a†² a²⟩ − ⟨a†a⟩²
fn number_excess<S: Correlators + ?Sized>(src: &S, mode: Mode) -> Result<f64, WitnessError> {
    let n = occupation(src, mode)?;
    let q = real(
        || format!("antibunch_{mode}"),
        src.quad(cre(mode), cre(mode), ann(mode), ann(mode)),
    )?;
    Ok(q - n * n)
}

/// Mandel Q parameter; `None` when the occupation is too small for the
/// normalization to be meaningful.
pub fn mandel_q<S: Correlators + ?Sized>(src: &S, mode: Mode) -> Result<Option<f64>, WitnessError> {
    let n = occupation(src, mode)?;
    let excess = number_excess(src, mode)?;
    if n < MANDEL_MIN_OCCUPATION {
        return Ok(None);
    }
    Ok(Some(excess / n))
}

pub fn antibunch_single<S: Correlators + ?Sized>(src: &S, mode: Mode) -> Result<f64, WitnessError> {
    number_excess(src, mode)
}

pub fn antibunch_inter<S: Correlators + ?Sized>(src: &S, pair: Pair) -> Result<f64, WitnessError> {
    let (a, b) = pair.modes();
    let q = real(
        || format!("antibunch_{}", pair.label()),
        src.quad(cre(a), cre(b), ann(b), ann(a)),
    )?;
    Ok(q - occupation(src, a)? * occupation(src, b)?)
}

/// Variance of the Hermitian combination Σ c_u u.
fn linear_variance<S: Correlators + ?Sized>(
    src: &S,
    terms: &[(OperatorFactor, Complex64)],
    name: impl Fn() -> String,
) -> Result<f64, WitnessError> {
    let mut second = Complex64::default();
    let mut first = Complex64::default();
    for &(u, cu) in terms {
        first += cu * src.mean(u);
        for &(v, cv) in terms {
            second += cu * cv * src.pair(u, v);
        }
    }
    real(name, second - first * first)
}

fn quadrature_terms(modes: &[Mode], scale: f64) -> [Vec<(OperatorFactor, Complex64)>; 2] {
    // X = s Σ (a + a†)/2,  Y = s Σ (a − a†)/2i
    let half = Complex64::new(0.5 * scale, 0.0);
    let minus_half_i = Complex64::new(0.0, -0.5 * scale);
    let x = modes
        .iter()
        .flat_map(|&m| [(ann(m), half), (cre(m), half)])
        .collect();
    let y = modes
        .iter()
        .flat_map(|&m| [(ann(m), minus_half_i), (cre(m), -minus_half_i)])
        .collect();
    [x, y]
}

pub fn quadrature_variances<S: Correlators + ?Sized>(
    src: &S,
    mode: Mode,
) -> Result<Quadratures, WitnessError> {
    let [x, y] = quadrature_terms(&[mode], 1.0);
    Ok(Quadratures {
        x: linear_variance(src, &x, || format!("var_x_{mode}"))?,
        y: linear_variance(src, &y, || format!("var_y_{mode}"))?,
    })
}

/// Variances of X_ab = (a + a† + b + b†)/2√2 and Y_ab = (a − a† + b − b†)/2i√2.
pub fn intermodal_quadrature_variances<S: Correlators + ?Sized>(
    src: &S,
    pair: Pair,
) -> Result<Quadratures, WitnessError> {
    let (a, b) = pair.modes();
    let [x, y] = quadrature_terms(&[a, b], std::f64::consts::FRAC_1_SQRT_2);
    Ok(Quadratures {
        x: linear_variance(src, &x, || format!("var_x_{}", pair.label()))?,
        y: linear_variance(src, &y, || format!("var_y_{}", pair.label()))?,
    })
}

pub fn duan<S: Correlators + ?Sized>(src: &S, pair: Pair) -> Result<f64, WitnessError> {
    let q = intermodal_quadrature_variances(src, pair)?;
    Ok(4.0 * q.x + 4.0 * q.y - 2.0)
}

fn hz_e_modes<S: Correlators + ?Sized>(src: &S, a: Mode, b: Mode) -> Result<f64, WitnessError> {
    let q = real(
        || format!("hz_e_{a}{b}"),
        src.quad(cre(a), ann(a), cre(b), ann(b)),
    )?;
    Ok(q - src.pair(ann(a), cre(b)).norm_sqr())
}

pub fn hz_pair<S: Correlators + ?Sized>(
    src: &S,
    pair: Pair,
) -> Result<HilleryZubairy, WitnessError> {
    let (a, b) = pair.modes();
    let e = hz_e_modes(src, a, b)?;
    let e_tilde = occupation(src, a)? * occupation(src, b)? - src.pair(ann(a), ann(b)).norm_sqr();
    Ok(HilleryZubairy { e, e_tilde })
}

/// 𝒮_xy = ℰ_xy + ⟨x†x⟩/2.
pub fn steering<S: Correlators + ?Sized>(src: &S, pair: OrderedPair) -> Result<f64, WitnessError> {
    let OrderedPair(x, y) = pair;
    Ok(hz_e_modes(src, x, y)? + occupation(src, x)? / 2.0)
}

pub fn bisep<S: Correlators + ?Sized>(
    src: &S,
    partition: Partition,
) -> Result<Biseparability, WitnessError> {
    let (a, b, c) = partition.modes();
    let label = partition.label();
    let six = real(|| format!("bisep_e_{label}"), src.number_triple())?;
    let e = six - src.triple(ann(a), ann(b), cre(c)).norm_sqr();
    let four = real(
        || format!("bisep_ep_{label}"),
        src.quad(cre(a), ann(a), cre(b), ann(b)),
    )?;
    let e_prime = four * occupation(src, c)? - src.triple(ann(a), ann(b), ann(c)).norm_sqr();
    Ok(Biseparability { e, e_prime })
}

/// Every witness at one time point. Mandel entries are NaN where undefined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessRecord {
    pub mandel_q: [f64; 3],
    pub antibunch_single: [f64; 3],
    /// Indexed by [`Pair::ALL`].
    pub antibunch_inter: [f64; 3],
    pub quadrature: [Quadratures; 3],
    pub intermodal_quadrature: [Quadratures; 3],
    pub duan: [f64; 3],
    pub hz: [HilleryZubairy; 3],
    /// Indexed by [`OrderedPair::ALL`].
    pub steering: [f64; 6],
    /// Indexed by [`Partition::ALL`].
    pub bisep: [Biseparability; 3],
}

fn try_array<T, const N: usize, I: Copy>(
    items: [I; N],
    f: impl Fn(I) -> Result<T, WitnessError>,
) -> Result<[T; N], WitnessError> {
    let mut out = Vec::with_capacity(N);
    for item in items {
        out.push(f(item)?);
    }
    Ok(out.try_into().unwrap_or_else(|_| unreachable!()))
}

impl WitnessRecord {
    pub fn evaluate<S: Correlators + ?Sized>(src: &S) -> Result<Self, WitnessError> {
        Ok(WitnessRecord {
            mandel_q: try_array(Mode::ALL, |m| Ok(mandel_q(src, m)?.unwrap_or(f64::NAN)))?,
            antibunch_single: try_array(Mode::ALL, |m| antibunch_single(src, m))?,
            antibunch_inter: try_array(Pair::ALL, |p| antibunch_inter(src, p))?,
            quadrature: try_array(Mode::ALL, |m| quadrature_variances(src, m))?,
            intermodal_quadrature: try_array(Pair::ALL, |p| {
                intermodal_quadrature_variances(src, p)
            })?,
            duan: try_array(Pair::ALL, |p| duan(src, p))?,
            hz: try_array(Pair::ALL, |p| hz_pair(src, p))?,
            steering: try_array(OrderedPair::ALL, |p| steering(src, p))?,
            bisep: try_array(Partition::ALL, |p| bisep(src, p))?,
        })
    }

    /// Column names in the order of [`WitnessRecord::values`].
    pub fn column_names() -> Vec<String> {
        let mut names = Vec::with_capacity(Self::COLUMN_COUNT);
        names.extend(Mode::ALL.iter().map(|m| format!("mandel_{m}")));
        names.extend(Mode::ALL.iter().map(|m| format!("antibunch_{m}")));
        names.extend(Pair::ALL.iter().map(|p| format!("antibunch_{}", p.label())));
        for m in Mode::ALL {
            names.push(format!("var_x_{m}"));
            names.push(format!("var_y_{m}"));
        }
        for p in Pair::ALL {
            names.push(format!("var_x_{}", p.label()));
            names.push(format!("var_y_{}", p.label()));
        }
        names.extend(Pair::ALL.iter().map(|p| format!("duan_{}", p.label())));
        names.extend(Pair::ALL.iter().map(|p| format!("hz_e_{}", p.label())));
        names.extend(Pair::ALL.iter().map(|p| format!("hz_et_{}", p.label())));
        names.extend(
            OrderedPair::ALL
                .iter()
                .map(|p| format!("steering_{}", p.label())),
        );
        names.extend(
            Partition::ALL
                .iter()
                .map(|p| format!("bisep_e_{}", p.label())),
        );
        names.extend(
            Partition::ALL
                .iter()
                .map(|p| format!("bisep_ep_{}", p.label())),
        );
        names
    }

    pub const COLUMN_COUNT: usize = 3 + 3 + 3 + 6 + 6 + 3 + 3 + 3 + 6 + 3 + 3;

    pub fn values(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(Self::COLUMN_COUNT);
        v.extend(self.mandel_q);
        v.extend(self.antibunch_single);
        v.extend(self.antibunch_inter);
        for q in self.quadrature.iter().chain(&self.intermodal_quadrature) {
            v.push(q.x);
            v.push(q.y);
        }
        v.extend(self.duan);
        v.extend(self.hz.iter().map(|h| h.e));
        v.extend(self.hz.iter().map(|h| h.e_tilde));
        v.extend(self.steering);
        v.extend(self.bisep.iter().map(|b| b.e));
        v.extend(self.bisep.iter().map(|b| b.e_prime));
        v
    }

    pub fn value(&self, column: &str) -> Option<f64> {
        let idx = Self::column_names().iter().position(|c| c == column)?;
        Some(self.values()[idx])
    }
}

/// Resolves a comma-separated selector into column indices. Each entry is
/// either a full column name (`hz_e_AB`) or a family prefix (`hz_e`,
/// `steering`, `var_x`); `all` selects everything.
pub fn select_columns(selector: &str) -> Result<Vec<usize>, String> {
    let names = WitnessRecord::column_names();
    let mut picked = Vec::new();
    for raw in selector.split(',') {
        let key = raw.trim();
        if key.is_empty() {
            continue;
        }
        if key == "all" {
            picked.extend(0..names.len());
            continue;
        }
        let prefix = format!("{key}_");
        let matches: Vec<usize> = names
            .iter()
            .enumerate()
            .filter(|(_, n)| *n == key || n.starts_with(&prefix))
            .map(|(i, _)| i)
            .collect();
        if matches.is_empty() {
            return Err(format!("unknown witness `{key}`"));
        }
        picked.extend(matches);
    }
    if picked.is_empty() {
        return Err("empty witness selection".into());
    }
    let mut seen = vec![false; names.len()];
    picked.retain(|&i| !std::mem::replace(&mut seen[i], true));
    Ok(picked)
}
