//! Higher-order correlators from stored first and second moments.
//!
//! Three- and four-factor expectations are replaced by the linearized
//! mean-field decoupling
//!
//! ```text
//! ⟨xyz⟩  ≈ ⟨xy⟩⟨z⟩ + ⟨x⟩⟨yz⟩ + ⟨xz⟩⟨y⟩ − 2⟨x⟩⟨y⟩⟨z⟩
//! ⟨wxyz⟩ ≈ ⟨wx⟩⟨yz⟩ + ⟨wy⟩⟨xz⟩ + ⟨wz⟩⟨xy⟩ − 2⟨w⟩⟨x⟩⟨y⟩⟨z⟩
//! ```
//!
//! which is exact for Gaussian states. Pair factors keep the order in which
//! they appear in the word, so callers should pass normal-ordered words.

use num_complex::Complex64;

use crate::model::{Mode, Moment, MomentState};

/// One ladder operator: `mode` or `mode†`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OperatorFactor {
    pub mode: Mode,
    pub daggered: bool,
}

impl OperatorFactor {
    pub const fn ann(mode: Mode) -> Self {
        OperatorFactor {
            mode,
            daggered: false,
        }
    }

    pub const fn cre(mode: Mode) -> Self {
        OperatorFactor {
            mode,
            daggered: true,
        }
    }

    /// Hermitian conjugate of the single factor.
    pub const fn dagger(self) -> Self {
        OperatorFactor {
            mode: self.mode,
            daggered: !self.daggered,
        }
    }
}

impl std::fmt::Display for OperatorFactor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", self.mode, if self.daggered { "†" } else { "" })
    }
}

/// Source of normal-ordered correlators up to the orders the witnesses
/// need. Implemented by [`MomentState`] (decoupled) and by the Fock-space
/// oracle (exact).
pub trait Correlators {
    fn mean(&self, x: OperatorFactor) -> Complex64;
    fn pair(&self, x: OperatorFactor, y: OperatorFactor) -> Complex64;
    fn triple(&self, x: OperatorFactor, y: OperatorFactor, z: OperatorFactor) -> Complex64;
    fn quad(
        &self,
        w: OperatorFactor,
        x: OperatorFactor,
        y: OperatorFactor,
        z: OperatorFactor,
    ) -> Complex64;
    /// ⟨A†A B†B C†C⟩.
    fn number_triple(&self) -> Complex64;

    fn occupation(&self, mode: Mode) -> Complex64 {
        self.pair(OperatorFactor::cre(mode), OperatorFactor::ann(mode))
    }
}

pub fn single_moment(state: &MomentState, x: OperatorFactor) -> Complex64 {
    let slot = match (x.mode, x.daggered) {
        (Mode::A, false) => Moment::A,
        (Mode::B, false) => Moment::B,
        (Mode::C, false) => Moment::C,
        (Mode::A, true) => Moment::Ad,
        (Mode::B, true) => Moment::Bd,
        (Mode::C, true) => Moment::Cd,
    };
    state[slot]
}

/// ⟨xy⟩ from the stored slots. Same-mode anti-normal pairs use
/// ⟨aa†⟩ = ⟨a†a⟩ + 1; factors of different modes commute.
pub fn pair_moment(state: &MomentState, x: OperatorFactor, y: OperatorFactor) -> Complex64 {
    use Moment::*;
    if x.mode == y.mode {
        let (sq, sq_d, occ) = match x.mode {
            Mode::A => (AA, AdAd, AdA),
            Mode::B => (BB, BdBd, BdB),
            Mode::C => (CC, CdCd, CdC),
        };
        return match (x.daggered, y.daggered) {
            (false, false) => state[sq],
            (true, true) => state[sq_d],
            (true, false) => state[occ],
            (false, true) => state[occ] + 1.0,
        };
    }
    let (first, second) = if x.mode < y.mode { (x, y) } else { (y, x) };
    let slots = match (first.mode, second.mode) {
        (Mode::A, Mode::B) => [AB, ABd, AdB, AdBd],
        (Mode::B, Mode::C) => [BC, BCd, BdC, BdCd],
        (Mode::A, Mode::C) => [AC, ACd, AdC, AdCd],
        _ => unreachable!("modes are distinct and ordered"),
    };
    let idx = (first.daggered as usize) * 2 + second.daggered as usize;
    state[slots[idx]]
}

pub fn decouple3(
    state: &MomentState,
    x: OperatorFactor,
    y: OperatorFactor,
    z: OperatorFactor,
) -> Complex64 {
    let (mx, my, mz) = (
        single_moment(state, x),
        single_moment(state, y),
        single_moment(state, z),
    );
    pair_moment(state, x, y) * mz + mx * pair_moment(state, y, z) + pair_moment(state, x, z) * my
        - mx * my * mz * 2.0
}

pub fn decouple4(
    state: &MomentState,
    w: OperatorFactor,
    x: OperatorFactor,
    y: OperatorFactor,
    z: OperatorFactor,
) -> Complex64 {
    let p = |u, v| pair_moment(state, u, v);
    let m = |u| single_moment(state, u);
    p(w, x) * p(y, z) + p(w, y) * p(x, z) + p(w, z) * p(x, y) - m(w) * m(x) * m(y) * m(z) * 2.0
}

/// ⟨A†A B†B C†C⟩ by applying the three-factor rule to the composite
/// number operators X = A†A, Y = B†B, Z = C†C, with each ⟨XY⟩ taken from
/// the four-factor rule.
pub fn number_triple_product(state: &MomentState) -> Complex64 {
    use OperatorFactor as F;
    let (a, ad) = (F::ann(Mode::A), F::cre(Mode::A));
    let (b, bd) = (F::ann(Mode::B), F::cre(Mode::B));
    let (c, cd) = (F::ann(Mode::C), F::cre(Mode::C));
    let nx = state[Moment::AdA];
    let ny = state[Moment::BdB];
    let nz = state[Moment::CdC];
    let xy = decouple4(state, ad, a, bd, b);
    let yz = decouple4(state, bd, b, cd, c);
    let xz = decouple4(state, ad, a, cd, c);
    xy * nz + nx * yz + xz * ny - nx * ny * nz * 2.0
}

impl Correlators for MomentState {
    fn mean(&self, x: OperatorFactor) -> Complex64 {
        single_moment(self, x)
    }

    fn pair(&self, x: OperatorFactor, y: OperatorFactor) -> Complex64 {
        pair_moment(self, x, y)
    }

    fn triple(&self, x: OperatorFactor, y: OperatorFactor, z: OperatorFactor) -> Complex64 {
        decouple3(self, x, y, z)
    }

    fn quad(
        &self,
        w: OperatorFactor,
        x: OperatorFactor,
        y: OperatorFactor,
        z: OperatorFactor,
    ) -> Complex64 {
        decouple4(self, w, x, y, z)
    }

    fn number_triple(&self) -> Complex64 {
        number_triple_product(self)
    }
}
