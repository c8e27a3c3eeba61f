//! Polynomial Hamiltonians in Fourier coordinates on a finite mode lattice.
//!
//! The cubic NLS Hamiltonian splits as `h0 + h1`, quadratic plus quartic.
//! Monomials are sorted multisets of u and ū modes; coefficients are exact
//! Gaussian rationals.

mod coefficient;
mod kernel;
mod monomial;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

pub use coefficient::{rat, Coeff};
pub use kernel::{parse_rational, poisson_bracket, Kernel};
pub use monomial::{Mode, ModeLattice, Monomial, MAX_DIM};

use crate::error::{Error, Result};

/// Monomials with `|phase| ≤ threshold` count as resonant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ResonanceConfig {
    pub threshold: u64,
}

impl ResonanceConfig {
    pub fn new(threshold: u64) -> Self {
        ResonanceConfig { threshold }
    }

    pub fn is_resonant(&self, phase: i64) -> bool {
        phase.unsigned_abs() <= self.threshold
    }
}

/// Lattice, resonance threshold and degree cutoff shared by every kernel
/// of one computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalConfig {
    pub lattice: ModeLattice,
    pub resonance: ResonanceConfig,
    pub cutoff: usize,
}

impl EvalConfig {
    pub fn new(lattice: ModeLattice, threshold: u64, cutoff: usize) -> Result<Self> {
        if cutoff < 4 || !cutoff.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "cutoff {cutoff} must be even and at least 4"
            )));
        }
        Ok(EvalConfig {
            lattice,
            resonance: ResonanceConfig::new(threshold),
            cutoff,
        })
    }

    /// One-dimensional lattice of the given radius.
    pub fn d1(radius: i64, threshold: u64, cutoff: usize) -> Result<Self> {
        EvalConfig::new(ModeLattice::new(1, radius)?, threshold, cutoff)
    }

    pub fn zero(&self) -> Kernel {
        Kernel::zero(self.lattice, self.cutoff)
    }
}

/// `(i/2) Σ_k |k|² u_k ū_k`.
pub fn h0(lat: ModeLattice, cutoff: usize) -> Kernel {
    let half_i = Coeff::imag(rat(1, 2));
    let terms = lat.modes().into_iter().map(|k| {
        (
            Monomial::new(vec![k], vec![k]),
            half_i.scale(&rat(k.norm2(), 1)),
        )
    });
    Kernel::from_terms(lat, cutoff, terms).expect("lattice modes are in the lattice")
}

/// `(i/4) Σ u_{k1} ū_{k2} u_{k3} ū_{k4}` over ordered tuples with
/// `k1 − k2 + k3 − k4 = 0`, folded onto multiset monomials.
pub fn h1(lat: ModeLattice, cutoff: usize) -> Kernel {
    let modes = lat.modes();
    let mut counts: HashMap<Monomial, i64> = HashMap::new();
    for k1 in &modes {
        for k2 in &modes {
            for k3 in &modes {
                let k4 = k1.sub(k2).add(k3);
                if lat.contains(&k4) {
                    *counts
                        .entry(Monomial::new(vec![*k1, *k3], vec![*k2, k4]))
                        .or_default() += 1;
                }
            }
        }
    }
    let terms = counts.into_iter().map(|(m, n)| (m, Coeff::imag(rat(n, 4))));
    Kernel::from_terms(lat, cutoff, terms).expect("lattice modes are in the lattice")
}

pub fn phase(m: &Monomial) -> i64 {
    m.phase()
}

/// `(resonant, non-resonant)` parts; an exact partition of the terms.
pub fn split_resonant(a: &Kernel, cfg: &ResonanceConfig) -> (Kernel, Kernel) {
    (
        a.filter(|m, _| cfg.is_resonant(m.phase())),
        a.filter(|m, _| !cfg.is_resonant(m.phase())),
    )
}

pub fn resonant_part(a: &Kernel, cfg: &ResonanceConfig) -> Kernel {
    a.filter(|m, _| cfg.is_resonant(m.phase()))
}

pub fn nonresonant_part(a: &Kernel, cfg: &ResonanceConfig) -> Kernel {
    a.filter(|m, _| !cfg.is_resonant(m.phase()))
}

/// Multiplies each non-resonant coefficient by `1/(2·phase)` and drops the
/// resonant terms.
pub fn apply_phase_filter(a: &Kernel, cfg: &ResonanceConfig) -> Kernel {
    a.filter(|m, _| !cfg.is_resonant(m.phase()))
        .map_coeffs(|m, c| {
            c.scale(&BigRational::new(
                BigInt::from(1),
                BigInt::from(2 * m.phase()),
            ))
        })
}

/// `{h0, apply_phase_filter(A)} = FILTER_BRACKET_FACTOR · nonres(A)`, since
/// `{h0, M} = (phase(M)/2)·M` for a single monomial `M` under the bracket
/// convention of [`Kernel::bracket`].
pub fn filter_bracket_factor() -> BigRational {
    rat(1, 4)
}

/// Sign in `{h0, phase_generator(A)} = GENERATOR_SIGN · nonres(A)`.
pub const GENERATOR_SIGN: i64 = -1;

/// `phase_generator = GENERATOR_SCALE · apply_phase_filter`, chosen so the
/// identity under [`GENERATOR_SIGN`] holds exactly.
pub const GENERATOR_SCALE: i64 = -4;

/// The generator `F` solving `{h0, F} = −nonres(A)`: each non-resonant
/// coefficient `c` becomes `−2c/phase`.
pub fn phase_generator(a: &Kernel, cfg: &ResonanceConfig) -> Kernel {
    apply_phase_filter(a, cfg).scale(&Coeff::from_ints(GENERATOR_SCALE, 0))
}
