//! Exact-versus-decoupled comparison of higher-order correlators and
//! witnesses along a scenario.

use num_complex::Complex64;

use crate::closure::{decouple3, decouple4, number_triple_product, Correlators, OperatorFactor};
use crate::dynamics::integrate_on;
use crate::error::OracleError;
use crate::model::{Mode, Moment, MomentState, Scenario, SystemParams};
use crate::ode::DormandPrince;
use crate::witnesses::{Pair, WitnessRecord};

use super::fock::{DensityMatrix, ExactCorrelators, FockBasisSpec};
use super::generator::{build_generator, evolve_observed};

/// One compared quantity sampled on the report's time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosureColumn {
    pub name: String,
    pub exact: Vec<f64>,
    pub decoupled: Vec<f64>,
}

impl ClosureColumn {
    fn new(name: String, len: usize) -> Self {
        ClosureColumn {
            name,
            exact: Vec::with_capacity(len),
            decoupled: Vec::with_capacity(len),
        }
    }

    pub fn abs_error(&self, k: usize) -> f64 {
        (self.exact[k] - self.decoupled[k]).abs()
    }

    /// Largest absolute error, ignoring samples where either side is NaN.
    pub fn max_abs_error(&self) -> f64 {
        (0..self.exact.len())
            .map(|k| self.abs_error(k))
            .filter(|e| !e.is_nan())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosureReport {
    pub times: Vec<f64>,
    pub columns: Vec<ClosureColumn>,
    /// Per sample, max |exact − integrated| over the six first moments.
    pub first_moment_error: Vec<f64>,
    /// Per sample, max |exact − integrated| over the 21 second moments.
    pub second_moment_error: Vec<f64>,
}

impl ClosureReport {
    pub fn column(&self, name: &str) -> Option<&ClosureColumn> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn max_first_moment_error(&self) -> f64 {
        self.first_moment_error.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_second_moment_error(&self) -> f64 {
        self.second_moment_error.iter().copied().fold(0.0, f64::max)
    }

    /// (name, max abs error) per column.
    pub fn summary(&self) -> Vec<(String, f64)> {
        self.columns
            .iter()
            .map(|c| (c.name.clone(), c.max_abs_error()))
            .collect()
    }
}

/// Names of the higher-order correlator columns, ahead of the witness
/// columns.
fn correlator_names() -> Vec<String> {
    let mut names: Vec<String> = Pair::ALL
        .iter()
        .map(|p| format!("nn_{}", p.label()))
        .collect();
    names.push("re_ABCd".into());
    names.push("im_ABCd".into());
    names.push("nnn".into());
    names
}

fn exact_correlators(src: &ExactCorrelators<'_>) -> Vec<f64> {
    use OperatorFactor as F;
    let mut out = Vec::with_capacity(6);
    for pair in Pair::ALL {
        let (x, y) = pair.modes();
        out.push(src.quad(F::cre(x), F::ann(x), F::cre(y), F::ann(y)).re);
    }
    let abc = src.triple(F::ann(Mode::A), F::ann(Mode::B), F::cre(Mode::C));
    out.push(abc.re);
    out.push(abc.im);
    out.push(src.number_triple().re);
    out
}

fn decoupled_correlators(s: &MomentState) -> Vec<f64> {
    use OperatorFactor as F;
    let mut out = Vec::with_capacity(6);
    for pair in Pair::ALL {
        let (x, y) = pair.modes();
        out.push(decouple4(s, F::cre(x), F::ann(x), F::cre(y), F::ann(y)).re);
    }
    let abc: Complex64 = decouple3(s, F::ann(Mode::A), F::ann(Mode::B), F::cre(Mode::C));
    out.push(abc.re);
    out.push(abc.im);
    out.push(number_triple_product(s).re);
    out
}

/// Runs the oracle and the moment equations side by side from the same
/// truncated thermal-product initial state (occupations taken from the
/// scenario's initial moments, which must carry no coherences) and records
/// exact and decoupled values of the higher-order correlators and of every
/// witness column at each sample time.
pub fn closure_report(
    params: &SystemParams,
    scenario: &Scenario,
    basis: &FockBasisSpec,
) -> Result<ClosureReport, OracleError> {
    scenario.validate()?;
    let init = &scenario.initial;
    let coherent = Moment::ALL
        .iter()
        .filter(|m| !matches!(m, Moment::AdA | Moment::BdB | Moment::CdC))
        .any(|&m| init[m] != Complex64::default());
    if coherent {
        return Err(OracleError::InvalidDensity(
            "closure report needs an initial state without coherences".into(),
        ));
    }
    let nbar = Mode::ALL.map(|m| init.occupation(m).re);
    let rho0 = DensityMatrix::thermal_product(basis, nbar)?;
    let generator = build_generator(params, basis)?;
    let times = scenario.sample_times();

    // Start the moment equations from the exact moments of the truncated
    // initial state so that only dynamics and closure differ.
    let start = ExactCorrelators::new(basis, &rho0)?.moment_state();
    let trajectory = integrate_on(
        params,
        &start,
        &times,
        DormandPrince::new(scenario.tolerances),
    )?;

    let mut names = correlator_names();
    names.extend(WitnessRecord::column_names());
    let mut columns: Vec<ClosureColumn> = names
        .into_iter()
        .map(|n| ClosureColumn::new(n, times.len()))
        .collect();
    let mut first_moment_error = Vec::with_capacity(times.len());
    let mut second_moment_error = Vec::with_capacity(times.len());
    let mut failure: Option<OracleError> = None;

    evolve_observed(
        &rho0,
        &generator,
        &times,
        scenario.tolerances,
        |k, _, rho| {
            if failure.is_some() {
                return;
            }
            let exact = ExactCorrelators { basis, rho };
            let decoupled = &trajectory.states[k];
            let exact_moments = exact.moment_state();
            let worst = |second: bool| {
                Moment::ALL
                    .iter()
                    .filter(|m| m.is_second_order() == second)
                    .map(|&m| (exact_moments[m] - decoupled[m]).norm())
                    .fold(0.0, f64::max)
            };
            first_moment_error.push(worst(false));
            second_moment_error.push(worst(true));
            let records = WitnessRecord::evaluate(&exact)
                .and_then(|e| WitnessRecord::evaluate(decoupled).map(|d| (e, d)));
            let (we, wd) = match records {
                Ok(r) => r,
                Err(e) => {
                    failure = Some(e.into());
                    return;
                }
            };
            let mut ex = exact_correlators(&exact);
            ex.extend(we.values());
            let mut de = decoupled_correlators(decoupled);
            de.extend(wd.values());
            for ((col, e), d) in columns.iter_mut().zip(ex).zip(de) {
                col.exact.push(e);
                col.decoupled.push(d);
            }
        },
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(ClosureReport {
        times,
        columns,
        first_moment_error,
        second_moment_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{initial_state, Tolerances};

    fn scenario(p: SystemParams, n0: f64, t_max: f64, samples: usize) -> Scenario {
        Scenario::new(
            p,
            initial_state(n0, n0, n0).unwrap(),
            t_max,
            samples,
            Tolerances::default(),
        )
        .unwrap()
    }

    #[test]
    fn vacuum_start_without_drive_stays_exact() {
        let p = crate::model::preset_params(crate::model::ConfigurationLabel::AN, 0.0);
        let basis = FockBasisSpec::new(2).unwrap();
        let r = closure_report(&p, &scenario(p, 0.0, 2.0, 11), &basis).unwrap();
        for (name, err) in r.summary() {
            assert!(err < 1e-10, "{name}: {err}");
        }
        assert!(r.max_first_moment_error() < 1e-10);
        assert!(r.max_second_moment_error() < 1e-10);
        assert_eq!(r.times.len(), 11);
    }

    #[test]
    fn rejects_coherent_initial_state() {
        let p = SystemParams::default();
        let mut s = scenario(p, 0.1, 1.0, 3);
        s.initial[Moment::A] = Complex64::new(0.1, 0.0);
        s.initial[Moment::Ad] = Complex64::new(0.1, 0.0);
        let basis = FockBasisSpec::new(2).unwrap();
        assert!(closure_report(&p, &s, &basis).is_err());
    }

    #[test]
    fn column_layout() {
        let p = SystemParams::default();
        let basis = FockBasisSpec::new(1).unwrap();
        let r = closure_report(&p, &scenario(p, 0.0, 1.0, 2), &basis).unwrap();
        assert_eq!(r.columns.len(), 6 + WitnessRecord::COLUMN_COUNT);
        assert!(r.column("nn_AB").is_some());
        assert!(r.column("steering_CA").is_some());
    }
}
