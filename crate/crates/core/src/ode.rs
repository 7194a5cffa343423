//! Embedded Dormand–Prince 5(4) integrator for autonomous complex linear
//! and nonlinear systems.
//!
//! Output is delivered at caller-specified times: steps are shortened to
//! land exactly on each output time, so no interpolation error enters the
//! samples. The scheme is FSAL (six derivative evaluations per accepted
//! step).

use num_complex::Complex64;

use crate::error::IntegrationError;
use crate::model::Tolerances;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth-order weights minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct DormandPrince {
    pub tolerances: Tolerances,
    pub max_steps: usize,
}

impl DormandPrince {
    pub fn new(tolerances: Tolerances) -> Self {
        DormandPrince {
            tolerances,
            max_steps: 10_000_000,
        }
    }

    fn error_norm(&self, y: &[Complex64], y_new: &[Complex64], err: &[Complex64]) -> f64 {
        let Tolerances { abs, rel } = self.tolerances;
        let sum: f64 = y
            .iter()
            .zip(y_new)
            .zip(err)
            .map(|((a, b), e)| {
                let scale = abs + rel * a.norm().max(b.norm());
                let r = e.norm() / scale;
                r * r
            })
            .sum();
        (sum / y.len().max(1) as f64).sqrt()
    }

    fn scaled_norm(&self, y: &[Complex64], v: &[Complex64]) -> f64 {
        let Tolerances { abs, rel } = self.tolerances;
        let sum: f64 = y
            .iter()
            .zip(v)
            .map(|(a, b)| {
                let r = b.norm() / (abs + rel * a.norm());
                r * r
            })
            .sum();
        (sum / y.len().max(1) as f64).sqrt()
    }

    fn initial_step<F>(&self, f: &F, y0: &[Complex64], f0: &[Complex64], span: f64) -> f64
    where
        F: Fn(&[Complex64], &mut [Complex64]),
    {
        let d0 = self.scaled_norm(y0, y0);
        let d1 = self.scaled_norm(y0, f0);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let h0 = h0.min(span);
        let y1: Vec<Complex64> = y0.iter().zip(f0).map(|(y, k)| y + k * h0).collect();
        let mut f1 = vec![Complex64::default(); y0.len()];
        f(&y1, &mut f1);
        let diff: Vec<Complex64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
        let d2 = self.scaled_norm(y0, &diff) / h0;
        let dmax = d1.max(d2);
        let h1 = if dmax <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / dmax).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span)
    }

    /// Integrates `dy/dt = f(y)` from `times[0]` through each later entry of
    /// `times`, calling `observe(index, t, y)` at every output time
    /// (including the initial one).
    pub fn integrate<F, O>(
        &self,
        f: F,
        y0: &[Complex64],
        times: &[f64],
        mut observe: O,
    ) -> Result<IntegrationStats, IntegrationError>
    where
        F: Fn(&[Complex64], &mut [Complex64]),
        O: FnMut(usize, f64, &[Complex64]),
    {
        let Some(&t0) = times.first() else {
            return Err(IntegrationError::InvalidGrid("empty time grid".into()));
        };
        if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
            return Err(IntegrationError::InvalidGrid(
                "output times must be finite and strictly increasing".into(),
            ));
        }
        if y0.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(IntegrationError::NonFinite { last_good_time: t0 });
        }

        let n = y0.len();
        let mut stats = IntegrationStats::default();
        let mut y = y0.to_vec();
        observe(0, t0, &y);
        if times.len() == 1 {
            return Ok(stats);
        }

        let zero = Complex64::default();
        let mut k1 = vec![zero; n];
        let mut k2 = vec![zero; n];
        let mut k3 = vec![zero; n];
        let mut k4 = vec![zero; n];
        let mut k5 = vec![zero; n];
        let mut k6 = vec![zero; n];
        let mut k7 = vec![zero; n];
        let mut stage = vec![zero; n];
        let mut y_new = vec![zero; n];
        let mut err = vec![zero; n];

        f(&y, &mut k1);
        stats.evaluations += 1;
        let span = times[times.len() - 1] - t0;
        let mut h = self.initial_step(&f, &y, &k1, span);
        stats.evaluations += 1;

        let mut t = t0;
        let mut next = 1;
        let mut steps = 0usize;

        while next < times.len() {
            let target = times[next];
            let remaining = target - t;
            let landing = h >= remaining * (1.0 - 1e-12);
            if !landing && !(h >= 1e-14 * t.abs().max(1.0)) {
                return Err(if h.is_nan() {
                    IntegrationError::NonFinite { last_good_time: t }
                } else {
                    IntegrationError::StepSizeUnderflow {
                        last_good_time: t,
                        step: h,
                    }
                });
            }
            let step = if landing { remaining } else { h };

            steps += 1;
            if steps > self.max_steps {
                return Err(IntegrationError::TooManySteps {
                    last_good_time: t,
                    max_steps: self.max_steps,
                });
            }

            for i in 0..n {
                stage[i] = y[i] + k1[i] * (step * A21);
            }
            f(&stage, &mut k2);
            for i in 0..n {
                stage[i] = y[i] + (k1[i] * A31 + k2[i] * A32) * step;
            }
            f(&stage, &mut k3);
            for i in 0..n {
                stage[i] = y[i] + (k1[i] * A41 + k2[i] * A42 + k3[i] * A43) * step;
            }
            f(&stage, &mut k4);
            for i in 0..n {
                stage[i] = y[i] + (k1[i] * A51 + k2[i] * A52 + k3[i] * A53 + k4[i] * A54) * step;
            }
            f(&stage, &mut k5);
            for i in 0..n {
                stage[i] = y[i]
                    + (k1[i] * A61 + k2[i] * A62 + k3[i] * A63 + k4[i] * A64 + k5[i] * A65) * step;
            }
            f(&stage, &mut k6);
            for i in 0..n {
                y_new[i] = y[i]
                    + (k1[i] * A71 + k3[i] * A73 + k4[i] * A74 + k5[i] * A75 + k6[i] * A76) * step;
            }
            f(&y_new, &mut k7);
            stats.evaluations += 6;
            for i in 0..n {
                err[i] =
                    (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7)
                        * step;
            }

            let mut e = self.error_norm(&y, &y_new, &err);
            if !e.is_finite() {
                e = f64::INFINITY;
            }

            if e <= 1.0 {
                stats.accepted += 1;
                t = if landing { target } else { t + step };
                std::mem::swap(&mut y, &mut y_new);
                std::mem::swap(&mut k1, &mut k7);
                let factor = if e == 0.0 {
                    MAX_FACTOR
                } else {
                    (SAFETY * e.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
                };
                let proposed = step * factor;
                h = if landing { proposed.max(h) } else { proposed };
                if landing {
                    observe(next, t, &y);
                    next += 1;
                }
            } else {
                stats.rejected += 1;
                let factor = if e.is_finite() {
                    (SAFETY * e.powf(-0.2)).clamp(MIN_FACTOR, 1.0)
                } else {
                    MIN_FACTOR
                };
                h = step * factor;
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(if e.is_finite() {
                        IntegrationError::StepSizeUnderflow {
                            last_good_time: t,
                            step: h,
                        }
                    } else {
                        IntegrationError::NonFinite { last_good_time: t }
                    });
                }
            }
        }
        Ok(stats)
    }
}
