#![allow(dead_code)]

use birkhoff_trees::hamiltonian::{rat, Coeff, Kernel, Mode, ModeLattice, Monomial};
use proptest::prelude::*;

pub fn lattice(dim: usize, radius: i64) -> ModeLattice {
    ModeLattice::new(dim, radius).unwrap()
}

pub fn mode(dim: usize, radius: i16) -> impl Strategy<Value = Mode> {
    prop::collection::vec(-radius..=radius, dim).prop_map(|c| {
        let mut m = [0i16; 3];
        m[..c.len()].copy_from_slice(&c);
        Mode(m)
    })
}

/// Monomial with `n` u-modes and `n` ū-modes, `n` in `1..=max_half`.
pub fn monomial(dim: usize, radius: i16, max_half: usize) -> impl Strategy<Value = Monomial> {
    (1..=max_half).prop_flat_map(move |n| {
        (
            prop::collection::vec(mode(dim, radius), n),
            prop::collection::vec(mode(dim, radius), n),
        )
            .prop_map(|(u, v)| Monomial::new(u, v))
    })
}

/// Momentum-free monomial: the last ū-mode is solved for, and rejected when
/// it leaves the lattice.
pub fn balanced_monomial(
    dim: usize,
    radius: i16,
    max_half: usize,
) -> impl Strategy<Value = Monomial> {
    monomial(dim, radius, max_half).prop_filter_map("momentum fix leaves the lattice", move |m| {
        let mut v = m.ubar().to_vec();
        let last = v.pop().unwrap();
        let fixed = last.add(&m.momentum());
        let lat = lattice(dim, radius as i64);
        lat.contains(&fixed).then(|| {
            v.push(fixed);
            Monomial::new(m.u().to_vec(), v)
        })
    })
}

pub fn coeff() -> impl Strategy<Value = Coeff> {
    (-3i64..=3, 1i64..=3, -3i64..=3, 1i64..=3)
        .prop_map(|(a, b, c, d)| Coeff::new(rat(a, b), rat(c, d)))
}

pub fn kernel_from(
    lat: ModeLattice,
    cutoff: usize,
    terms: impl Strategy<Value = Monomial>,
    max_terms: usize,
) -> impl Strategy<Value = Kernel> {
    prop::collection::vec((terms, coeff()), 0..=max_terms)
        .prop_map(move |ts| Kernel::from_terms(lat, cutoff, ts).unwrap())
}

/// Small kernels on the one-dimensional lattice of radius 2, degree ≤ 6.
pub fn small_kernel(cutoff: usize) -> impl Strategy<Value = Kernel> {
    kernel_from(lattice(1, 2), cutoff, monomial(1, 2, 3), 4)
}

pub fn balanced_kernel(cutoff: usize) -> impl Strategy<Value = Kernel> {
    kernel_from(lattice(1, 2), cutoff, balanced_monomial(1, 2, 3), 4)
}

pub fn single(lat: ModeLattice, cutoff: usize, m: Monomial) -> Kernel {
    Kernel::from_terms(lat, cutoff, vec![(m, Coeff::one())]).unwrap()
}

pub fn check_antisymmetry(a: &Kernel, b: &Kernel) -> Result<(), TestCaseError> {
    prop_assert_eq!(a.bracket(b).unwrap(), b.bracket(a).unwrap().neg());
    Ok(())
}

pub fn check_jacobi(a: &Kernel, b: &Kernel, c: &Kernel) -> Result<(), TestCaseError> {
    let x = a.bracket(&b.bracket(c).unwrap()).unwrap();
    let y = b.bracket(&c.bracket(a).unwrap()).unwrap();
    let z = c.bracket(&a.bracket(b).unwrap()).unwrap();
    let sum = x.add(&y).unwrap().add(&z).unwrap();
    prop_assert!(sum.is_empty(), "Jacobi sum has {} terms", sum.len());
    Ok(())
}

/// Every term of `{A, B}` for monomials `A`, `B` has degree `|A| + |B| − 2`.
pub fn check_monomial_degree(a: &Monomial, b: &Monomial) -> Result<(), TestCaseError> {
    for (m, _) in monomial_bracket(a, b).iter() {
        prop_assert_eq!(m.degree(), a.degree() + b.degree() - 2);
    }
    Ok(())
}

/// Every term of `{A, B}` has phase `Φ(A) + Φ(B)`.
pub fn check_phase_additivity(a: &Monomial, b: &Monomial) -> Result<(), TestCaseError> {
    for (m, _) in monomial_bracket(a, b).iter() {
        prop_assert_eq!(m.phase(), a.phase() + b.phase());
    }
    Ok(())
}

fn monomial_bracket(a: &Monomial, b: &Monomial) -> Kernel {
    let lat = lattice(1, 2);
    single(lat, PROPERTY_CUTOFF, a.clone())
        .bracket(&single(lat, PROPERTY_CUTOFF, b.clone()))
        .unwrap()
}

pub fn check_degree_law(a: &Kernel, b: &Kernel) -> Result<(), TestCaseError> {
    let br = a.bracket(b).unwrap();
    if !br.is_empty() {
        prop_assert!(br.degree() + 2 <= a.degree() + b.degree());
        prop_assert!(br.min_degree() + 2 >= a.min_degree() + b.min_degree());
    }
    Ok(())
}

pub fn check_momentum_closure(a: &Kernel, b: &Kernel) -> Result<(), TestCaseError> {
    for (m, _) in a.bracket(b).unwrap().iter() {
        prop_assert_eq!(m.momentum(), Mode::default());
    }
    Ok(())
}

/// Wide enough that brackets of three degree-6 kernels are never truncated.
pub const PROPERTY_CUTOFF: usize = 14;
