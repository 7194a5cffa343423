//! Linear moment equations for the three coupled modes and their
//! integration.
//!
//! The Hamiltonian is quadratic, so the first and second moments form a
//! closed linear system. All 27 slots are integrated, conjugates included;
//! every conjugate equation below mirrors its partner term by term, which
//! keeps integrated conjugate pairs bitwise conjugate.

use num_complex::Complex64;

use crate::error::DynamicsError;
use crate::model::{Moment, MomentState, Scenario, SystemParams, MOMENT_COUNT};
use crate::ode::{DormandPrince, IntegrationStats};

/// d⟨·⟩/dτ in the same slot layout as [`MomentState`].
pub type Derivative = MomentState;

/// `-i z`, exact in floating point.
#[inline]
fn mi(z: Complex64) -> Complex64 {
    Complex64::new(z.im, -z.re)
}

/// `+i z`, exact in floating point.
#[inline]
fn pi(z: Complex64) -> Complex64 {
    Complex64::new(-z.im, z.re)
}

#[inline]
fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Right-hand side of the moment equations.
pub fn rhs(s: &MomentState, p: &SystemParams) -> Derivative {
    let mut d = MomentState::zero();
    rhs_into(s.as_slice(), p, &mut d.0);
    d
}

/// Slice form of [`rhs`] used by the integrator.
pub fn rhs_into(y: &[Complex64], p: &SystemParams, dy: &mut [Complex64]) {
    use Moment::*;
    let s = |m: Moment| y[m.index()];
    let SystemParams {
        delta_a: da,
        delta_b: db,
        delta_c: dc,
        g_a: ga,
        g_b: gb,
        chi,
        gamma_a: ka,
        gamma_b: kb,
        gamma_c: kc,
        n_a,
        n_b,
        n_c,
    } = *p;
    let chi_c = re(chi);
    let mut set = |m: Moment, v: Complex64| dy[m.index()] = v;

    // first moments
    set(A, mi(s(A) * da + s(C) * ga + chi_c) - s(A) * (ka / 2.0));
    set(Ad, pi(s(Ad) * da + s(Cd) * ga + chi_c) - s(Ad) * (ka / 2.0));
    set(B, mi(s(B) * db + s(C) * gb) - s(B) * (kb / 2.0));
    set(Bd, pi(s(Bd) * db + s(Cd) * gb) - s(Bd) * (kb / 2.0));
    set(C, mi(s(C) * dc + s(A) * ga + s(B) * gb) - s(C) * (kc / 2.0));
    set(
        Cd,
        pi(s(Cd) * dc + s(Ad) * ga + s(Bd) * gb) - s(Cd) * (kc / 2.0),
    );

    // single-mode anomalous moments
    set(
        AA,
        mi(s(AA) * (2.0 * da) + s(AC) * (2.0 * ga) + s(A) * (2.0 * chi)) - s(AA) * ka,
    );
    set(
        AdAd,
        pi(s(AdAd) * (2.0 * da) + s(AdCd) * (2.0 * ga) + s(Ad) * (2.0 * chi)) - s(AdAd) * ka,
    );
    set(BB, mi(s(BB) * (2.0 * db) + s(BC) * (2.0 * gb)) - s(BB) * kb);
    set(
        BdBd,
        pi(s(BdBd) * (2.0 * db) + s(BdCd) * (2.0 * gb)) - s(BdBd) * kb,
    );
    set(
        CC,
        mi(s(CC) * (2.0 * dc) + s(AC) * (2.0 * ga) + s(BC) * (2.0 * gb)) - s(CC) * kc,
    );
    set(
        CdCd,
        pi(s(CdCd) * (2.0 * dc) + s(AdCd) * (2.0 * ga) + s(BdCd) * (2.0 * gb)) - s(CdCd) * kc,
    );

    // occupations, with thermal feeding from the baths
    set(
        AdA,
        pi((s(ACd) - s(AdC)) * ga + (s(A) - s(Ad)) * chi) + re(ka * n_a) - s(AdA) * ka,
    );
    set(BdB, pi((s(BCd) - s(BdC)) * gb) + re(kb * n_b) - s(BdB) * kb);
    set(
        CdC,
        pi((s(AdC) - s(ACd)) * ga + (s(BdC) - s(BCd)) * gb) - s(CdC) * kc + re(kc * n_c),
    );

    // A-B correlations
    let kab = (ka + kb) / 2.0;
    set(
        AB,
        mi(s(AB) * (da + db) + s(BC) * ga + s(AC) * gb + s(B) * chi) - s(AB) * kab,
    );
    set(
        AdBd,
        pi(s(AdBd) * (da + db) + s(BdCd) * ga + s(AdCd) * gb + s(Bd) * chi) - s(AdBd) * kab,
    );
    set(
        ABd,
        mi(s(ABd) * (da - db) + s(BdC) * ga - s(ACd) * gb + s(Bd) * chi) - s(ABd) * kab,
    );
    set(
        AdB,
        pi(s(AdB) * (da - db) + s(BCd) * ga - s(AdC) * gb + s(B) * chi) - s(AdB) * kab,
    );

    // B-C correlations
    let kbc = (kb + kc) / 2.0;
    set(
        BC,
        mi(s(BC) * (db + dc) + (s(CC) + s(BB)) * gb + s(AB) * ga) - s(BC) * kbc,
    );
    set(
        BdCd,
        pi(s(BdCd) * (db + dc) + (s(CdCd) + s(BdBd)) * gb + s(AdBd) * ga) - s(BdCd) * kbc,
    );
    set(
        BCd,
        mi(s(BCd) * (db - dc) + (s(CdC) - s(BdB)) * gb - s(AdB) * ga) - s(BCd) * kbc,
    );
    set(
        BdC,
        pi(s(BdC) * (db - dc) + (s(CdC) - s(BdB)) * gb - s(ABd) * ga) - s(BdC) * kbc,
    );

    // A-C correlations
    let kac = (ka + kc) / 2.0;
    set(
        AC,
        mi(s(AC) * (da + dc) + (s(CC) + s(AA)) * ga + s(AB) * gb + s(C) * chi) - s(AC) * kac,
    );
    set(
        AdCd,
        pi(s(AdCd) * (da + dc) + (s(CdCd) + s(AdAd)) * ga + s(AdBd) * gb + s(Cd) * chi)
            - s(AdCd) * kac,
    );
    set(
        ACd,
        mi(s(ACd) * (da - dc) + (s(CdC) - s(AdA)) * ga - s(ABd) * gb + s(Cd) * chi) - s(ACd) * kac,
    );
    set(
        AdC,
        pi(s(AdC) * (da - dc) + (s(CdC) - s(AdA)) * ga - s(AdB) * gb + s(C) * chi) - s(AdC) * kac,
    );
}

/// Time-ordered moment states on the scenario's sample grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<MomentState>,
    pub stats: IntegrationStats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &MomentState)> {
        self.times.iter().copied().zip(self.states.iter())
    }

    pub fn last(&self) -> Option<&MomentState> {
        self.states.last()
    }

    /// Largest conjugate-pair mismatch over every sample.
    pub fn max_conjugate_mismatch(&self) -> f64 {
        self.states
            .iter()
            .map(MomentState::conjugate_mismatch)
            .fold(0.0, f64::max)
    }
}

pub fn integrate(scenario: &Scenario) -> Result<Trajectory, DynamicsError> {
    scenario.validate()?;
    integrate_on(
        &scenario.params,
        &scenario.initial,
        &scenario.sample_times(),
        DormandPrince::new(scenario.tolerances),
    )
}

/// Integrates on an arbitrary increasing time grid starting at `times[0]`.
pub fn integrate_on(
    params: &SystemParams,
    initial: &MomentState,
    times: &[f64],
    solver: DormandPrince,
) -> Result<Trajectory, DynamicsError> {
    let mut states = Vec::with_capacity(times.len());
    let mut out_times = Vec::with_capacity(times.len());
    let stats = solver.integrate(
        |y, dy| rhs_into(y, params, dy),
        initial.as_slice(),
        times,
        |_, t, y| {
            out_times.push(t);
            states.push(MomentState::from_slice(y).expect("27 slots"));
        },
    )?;
    debug_assert_eq!(states.len(), times.len());
    Ok(Trajectory {
        times: out_times,
        states,
        stats,
    })
}

/// Fixed point of the first-moment subsystem (⟨A⟩, ⟨B⟩, ⟨C⟩).
pub fn steady_state_first_moments(p: &SystemParams) -> Result<[Complex64; 3], DynamicsError> {
    let i = Complex64::i();
    let mut m = [
        [
            -i * p.delta_a - p.gamma_a / 2.0,
            Complex64::default(),
            -i * p.g_a,
        ],
        [
            Complex64::default(),
            -i * p.delta_b - p.gamma_b / 2.0,
            -i * p.g_b,
        ],
        [-i * p.g_a, -i * p.g_b, -i * p.delta_c - p.gamma_c / 2.0],
    ];
    let mut b = [i * p.chi, Complex64::default(), Complex64::default()];
    solve3(&mut m, &mut b).ok_or(DynamicsError::NoSteadyState)?;
    Ok(b)
}

/// Gaussian elimination with partial pivoting; the solution overwrites `b`.
fn solve3(m: &mut [[Complex64; 3]; 3], b: &mut [Complex64; 3]) -> Option<()> {
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&x, &y| m[x][col].norm().total_cmp(&m[y][col].norm()))
            .unwrap();
        if m[pivot][col].norm() <= 1e-13 * scale {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            let pivot_row = m[col];
            for (dst, v) in m[row].iter_mut().zip(pivot_row).skip(col) {
                *dst -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    for col in (0..3).rev() {
        let mut acc = b[col];
        for k in col + 1..3 {
            acc -= m[col][k] * b[k];
        }
        b[col] = acc / m[col][col];
    }
    Some(())
}

const _: () = assert!(MOMENT_COUNT == 27);
