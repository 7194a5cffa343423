//! Scenario orchestration: witness time series, the sign matrix over all
//! configurations, and drive-strength sweeps.

use rayon::prelude::*;

use crate::dynamics::{integrate, Trajectory};
use crate::error::Error;
use crate::model::{
    initial_state, preset_params, ConfigurationLabel, Scenario, Tolerances, DEFAULT_SAMPLES,
    DEFAULT_T_MAX,
};
use crate::witnesses::{select_columns, WitnessRecord, COHERENT_VARIANCE};

pub const DEFAULT_THRESHOLD: f64 = 1e-4;
pub const TABLE_CHIS: [f64; 2] = [0.0, 0.2];

/// Witness records on the trajectory's time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessSeries {
    pub times: Vec<f64>,
    pub records: Vec<WitnessRecord>,
}

impl WitnessSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Values of one witness column over time.
    pub fn column(&self, index: usize) -> Vec<f64> {
        self.records.iter().map(|r| r.values()[index]).collect()
    }

    pub fn column_by_name(&self, name: &str) -> Option<Vec<f64>> {
        let idx = WitnessRecord::column_names()
            .iter()
            .position(|c| c == name)?;
        Some(self.column(idx))
    }
}

pub fn run_scenario(scenario: &Scenario) -> Result<(Trajectory, WitnessSeries), Error> {
    let trajectory = integrate(scenario)?;
    let records = trajectory
        .states
        .iter()
        .map(WitnessRecord::evaluate)
        .collect::<Result<Vec<_>, _>>()?;
    let series = WitnessSeries {
        times: trajectory.times.clone(),
        records,
    };
    Ok((trajectory, series))
}

/// Rows of the sign matrix with the witness columns each cell draws on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SignRow {
    Mandel,
    SingleSqueezing,
    IntermodalSqueezing,
    HzE,
    HzETilde,
    Duan,
    BisepE,
    BisepEPrime,
    AntibunchSingle,
    AntibunchInter,
    Steering,
}

impl SignRow {
    pub const ALL: [SignRow; 11] = [
        SignRow::Mandel,
        SignRow::SingleSqueezing,
        SignRow::IntermodalSqueezing,
        SignRow::HzE,
        SignRow::HzETilde,
        SignRow::Duan,
        SignRow::BisepE,
        SignRow::BisepEPrime,
        SignRow::AntibunchSingle,
        SignRow::AntibunchInter,
        SignRow::Steering,
    ];

    pub fn id(self) -> &'static str {
        match self {
            SignRow::Mandel => "mandel",
            SignRow::SingleSqueezing => "single_squeezing",
            SignRow::IntermodalSqueezing => "intermodal_squeezing",
            SignRow::HzE => "hz_e",
            SignRow::HzETilde => "hz_etilde",
            SignRow::Duan => "duan",
            SignRow::BisepE => "bisep_e",
            SignRow::BisepEPrime => "bisep_eprime",
            SignRow::AntibunchSingle => "antibunch_single",
            SignRow::AntibunchInter => "antibunch_inter",
            SignRow::Steering => "steering",
        }
    }

    /// Nonclassical when the minimum falls below this bound.
    pub fn bound(self) -> f64 {
        match self {
            SignRow::SingleSqueezing | SignRow::IntermodalSqueezing => COHERENT_VARIANCE,
            _ => 0.0,
        }
    }

    /// (cell suffix, witness columns whose pointwise minimum is tested).
    pub fn cells(self) -> Vec<(String, Vec<String>)> {
        let single = |suffix: &str, col: String| (suffix.to_string(), vec![col]);
        let modes = ["A", "B", "C"];
        let pairs = ["AB", "BC", "AC"];
        let parts = ["AB_C", "BC_A", "AC_B"];
        match self {
            SignRow::Mandel => modes
                .iter()
                .map(|m| single(m, format!("mandel_{m}")))
                .collect(),
            SignRow::SingleSqueezing => modes
                .iter()
                .map(|m| {
                    (
                        m.to_string(),
                        vec![format!("var_x_{m}"), format!("var_y_{m}")],
                    )
                })
                .collect(),
            SignRow::IntermodalSqueezing => pairs
                .iter()
                .map(|p| {
                    (
                        p.to_string(),
                        vec![format!("var_x_{p}"), format!("var_y_{p}")],
                    )
                })
                .collect(),
            SignRow::HzE => pairs
                .iter()
                .map(|p| single(p, format!("hz_e_{p}")))
                .collect(),
            SignRow::HzETilde => pairs
                .iter()
                .map(|p| single(p, format!("hz_et_{p}")))
                .collect(),
            SignRow::Duan => pairs
                .iter()
                .map(|p| single(p, format!("duan_{p}")))
                .collect(),
            SignRow::BisepE => parts
                .iter()
                .map(|p| single(p, format!("bisep_e_{p}")))
                .collect(),
            SignRow::BisepEPrime => parts
                .iter()
                .map(|p| single(p, format!("bisep_ep_{p}")))
                .collect(),
            SignRow::AntibunchSingle => modes
                .iter()
                .map(|m| single(m, format!("antibunch_{m}")))
                .collect(),
            SignRow::AntibunchInter => pairs
                .iter()
                .map(|p| single(p, format!("antibunch_{p}")))
                .collect(),
            SignRow::Steering => ["AB", "BA", "BC", "CB", "AC", "CA"]
                .iter()
                .map(|p| single(p, format!("steering_{p}")))
                .collect(),
        }
    }
}

/// One tick-or-cross entry with its evidence.
#[derive(Clone, Debug, PartialEq)]
pub struct SignCell {
    pub config: ConfigurationLabel,
    pub chi: f64,
    pub row: SignRow,
    /// Row id joined with the mode, pair or partition, e.g. `steering_AB`.
    pub label: String,
    pub tick: bool,
    /// Smallest value over τ ∈ (0, t_max]; NaN if never defined.
    pub min: f64,
    /// Time of the minimum; NaN if never defined.
    pub argmin: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignMatrix {
    pub threshold: f64,
    pub t_max: f64,
    pub cells: Vec<SignCell>,
}

impl SignMatrix {
    pub fn get(&self, config: ConfigurationLabel, chi: f64, label: &str) -> Option<&SignCell> {
        self.cells
            .iter()
            .find(|c| c.config == config && c.chi == chi && c.label == label)
    }
}

/// Settings for [`table_matrix`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TableOptions {
    pub t_max: f64,
    pub threshold: f64,
    pub samples: usize,
    pub tolerances: Tolerances,
    pub init: [f64; 3],
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions {
            t_max: DEFAULT_T_MAX,
            threshold: DEFAULT_THRESHOLD,
            samples: DEFAULT_SAMPLES,
            tolerances: Tolerances::default(),
            init: [1.0, 1.0, 1.0],
        }
    }
}

/// Classifies every cell of one series. Samples at τ = 0 are excluded.
pub fn sign_cells(
    config: ConfigurationLabel,
    chi: f64,
    series: &WitnessSeries,
    threshold: f64,
) -> Vec<SignCell> {
    let names = WitnessRecord::column_names();
    let values: Vec<Vec<f64>> = series.records.iter().map(WitnessRecord::values).collect();
    let mut out = Vec::new();
    for row in SignRow::ALL {
        for (suffix, cols) in row.cells() {
            let idx: Vec<usize> = cols
                .iter()
                .map(|c| names.iter().position(|n| n == c).expect("known column"))
                .collect();
            let mut min = f64::NAN;
            let mut argmin = f64::NAN;
            for (k, &t) in series.times.iter().enumerate() {
                if t <= 0.0 {
                    continue;
                }
                for &i in &idx {
                    let v = values[k][i];
                    if !v.is_nan() && (min.is_nan() || v < min) {
                        min = v;
                        argmin = t;
                    }
                }
            }
            out.push(SignCell {
                config,
                chi,
                row,
                label: format!("{}_{}", row.id(), suffix),
                tick: min < row.bound() - threshold,
                min,
                argmin,
            });
        }
    }
    out
}

/// Sign matrix over all four configurations at χ ∈ {0, 0.2}.
pub fn table_matrix(options: &TableOptions) -> Result<SignMatrix, Error> {
    if !(options.threshold > 0.0) {
        return Err(Error::Model(crate::error::ModelError::InvalidArgument(
            format!("threshold must be > 0, got {}", options.threshold),
        )));
    }
    let [na, nb, nc] = options.init;
    let initial = initial_state(na, nb, nc)?;
    let jobs: Vec<(ConfigurationLabel, f64)> = ConfigurationLabel::ALL
        .iter()
        .flat_map(|&c| TABLE_CHIS.iter().map(move |&chi| (c, chi)))
        .collect();
    let blocks = jobs
        .par_iter()
        .map(|&(config, chi)| -> Result<Vec<SignCell>, Error> {
            let scenario = Scenario::new(
                preset_params(config, chi),
                initial,
                options.t_max,
                options.samples,
                options.tolerances,
            )?;
            let (_, series) = run_scenario(&scenario)?;
            Ok(sign_cells(config, chi, &series, options.threshold))
        })
        .collect::<Vec<_>>();
    let mut cells = Vec::new();
    for b in blocks {
        cells.extend(b?);
    }
    Ok(SignMatrix {
        threshold: options.threshold,
        t_max: options.t_max,
        cells,
    })
}

/// One grid point of a χ sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub chi: f64,
    /// Selected witness columns over time, or the failure for this point.
    pub values: Result<Vec<Vec<f64>>, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSurface {
    pub config: ConfigurationLabel,
    pub times: Vec<f64>,
    /// Selected column names, matching the inner order of each row.
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

/// Runs `base` once per χ in `grid` with the configuration's preset
/// couplings. Failures are kept per point.
pub fn chi_sweep_with(
    base: &Scenario,
    config: ConfigurationLabel,
    grid: &[f64],
    selector: &str,
) -> Result<SweepSurface, Error> {
    if grid.is_empty() {
        return Err(Error::Model(crate::error::ModelError::InvalidArgument(
            "chi grid must not be empty".into(),
        )));
    }
    let idx = select_columns(selector)
        .map_err(|e| Error::Model(crate::error::ModelError::InvalidArgument(e)))?;
    let names = WitnessRecord::column_names();
    let rows = grid
        .par_iter()
        .map(|&chi| {
            let scenario = Scenario {
                params: base.params.with_chi(chi),
                ..base.clone()
            };
            let values = run_scenario(&scenario)
                .map(|(_, series)| idx.iter().map(|&i| series.column(i)).collect())
                .map_err(|e| e.to_string());
            SweepRow { chi, values }
        })
        .collect();
    Ok(SweepSurface {
        config,
        times: base.sample_times(),
        columns: idx.iter().map(|&i| names[i].clone()).collect(),
        rows,
    })
}

/// χ sweep over a preset with unit initial occupations and default
/// sampling.
pub fn chi_sweep(
    config: ConfigurationLabel,
    grid: &[f64],
    selector: &str,
    t_max: f64,
) -> Result<SweepSurface, Error> {
    let mut base = Scenario::preset(config, 0.0);
    base.t_max = t_max;
    base.validate()?;
    chi_sweep_with(&base, config, grid, selector)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SystemParams;

    fn short(config: ConfigurationLabel, chi: f64) -> Scenario {
        let mut s = Scenario::preset(config, chi);
        s.t_max = 2.0;
        s.sample_count = 41;
        s
    }

    #[test]
    fn series_aligned_with_trajectory() {
        let (traj, series) = run_scenario(&short(ConfigurationLabel::AN, 0.2)).unwrap();
        assert_eq!(traj.times, series.times);
        assert_eq!(series.len(), 41);
    }

    #[test]
    fn zero_parameters_are_stationary() {
        let s = Scenario::new(
            SystemParams::default(),
            initial_state(1.0, 0.5, 0.25).unwrap(),
            3.0,
            7,
            Tolerances::default(),
        )
        .unwrap();
        let (_, series) = run_scenario(&s).unwrap();
        let first = series.records[0].values();
        for r in &series.records {
            for (a, b) in r.values().iter().zip(&first) {
                assert!(a == b || (a.is_nan() && b.is_nan()));
            }
        }
    }

    #[test]
    fn antinode_mode_empties_faster() {
        let (an, _) = run_scenario(&Scenario::preset(ConfigurationLabel::AN, 0.0)).unwrap();
        let (na, _) = run_scenario(&Scenario::preset(ConfigurationLabel::NA, 0.0)).unwrap();
        let k = an.times.iter().position(|&t| t >= 2.0).unwrap();
        let occ = |t: &Trajectory| t.states[k].occupation(crate::model::Mode::A).re;
        assert!(occ(&an) < occ(&na));
    }

    #[test]
    fn cell_evidence_matches_classification() {
        let (_, series) = run_scenario(&short(ConfigurationLabel::NN, 0.2)).unwrap();
        let cells = sign_cells(ConfigurationLabel::NN, 0.2, &series, DEFAULT_THRESHOLD);
        assert_eq!(cells.len(), 36);
        for c in &cells {
            if c.tick {
                assert!(c.min < c.row.bound() - DEFAULT_THRESHOLD);
            } else {
                assert!(c.min.is_nan() || c.min >= c.row.bound() - DEFAULT_THRESHOLD);
            }
            assert!(c.argmin.is_nan() || c.argmin > 0.0);
        }
        assert!(cells.iter().any(|c| c.label == "steering_CA"));
        assert!(cells.iter().any(|c| c.label == "bisep_eprime_AB_C"));
    }

    #[test]
    fn table_rejects_nonpositive_threshold() {
        let opts = TableOptions {
            threshold: 0.0,
            ..TableOptions::default()
        };
        assert!(table_matrix(&opts).is_err());
    }

    #[test]
    fn single_point_sweep_reproduces_run() {
        let base = short(ConfigurationLabel::AN, 0.0);
        for chi in [0.0, 0.2] {
            let surf = chi_sweep_with(&base, ConfigurationLabel::AN, &[chi], "var_x_A").unwrap();
            let (_, series) = run_scenario(&short(ConfigurationLabel::AN, chi)).unwrap();
            let got = surf.rows[0].values.as_ref().unwrap();
            assert_eq!(got[0], series.column_by_name("var_x_A").unwrap());
        }
    }

    #[test]
    fn sweep_permutation_only_permutes_rows() {
        let base = short(ConfigurationLabel::NA, 0.0);
        let a =
            chi_sweep_with(&base, ConfigurationLabel::NA, &[0.0, 0.1, 0.2], "steering").unwrap();
        let b =
            chi_sweep_with(&base, ConfigurationLabel::NA, &[0.2, 0.0, 0.1], "steering").unwrap();
        assert_eq!(a.rows[0], b.rows[1]);
        assert_eq!(a.rows[1], b.rows[2]);
        assert_eq!(a.rows[2], b.rows[0]);
        assert_eq!(a.columns.len(), 6);
    }

    #[test]
    fn sweep_keeps_failed_points() {
        let base = short(ConfigurationLabel::AN, 0.0);
        let surf = chi_sweep_with(&base, ConfigurationLabel::AN, &[0.1, f64::NAN], "duan").unwrap();
        assert!(surf.rows[0].values.is_ok());
        assert!(surf.rows[1].values.is_err());
        assert!(chi_sweep_with(&base, ConfigurationLabel::AN, &[], "duan").is_err());
        assert!(chi_sweep_with(&base, ConfigurationLabel::AN, &[0.0], "nope").is_err());
    }
}
