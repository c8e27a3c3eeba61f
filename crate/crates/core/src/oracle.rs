//! Brute-force Birkhoff iteration, with no trees involved.
//!
//! Start from `h0 + h1`. At step `i` the block of degree `2i+2` is the lowest
//! one still carrying non-resonant terms; its generator `F_i` cancels them and
//! the Hamiltonian is replaced by its composition with the time-one flow of
//! `F_i`, expanded as a finite Taylor series at the degree cutoff.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::{h0, h1, phase_generator, Coeff, EvalConfig, Kernel, Monomial};

/// A non-decreasing sequence `z` with `c = Π (multiplicity)!` and `q = len z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceTerm {
    pub z: Vec<usize>,
    pub c: u64,
    pub q: usize,
}

/// Non-decreasing sequences with entries in `1..=n` summing to `m`, in
/// lexicographic order. `m = 0` gives the empty sequence alone.
pub fn sequences(n: usize, m: usize) -> Vec<SequenceTerm> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    walk(n, m, 1, &mut cur, &mut out);
    out
}

fn walk(n: usize, left: usize, min: usize, cur: &mut Vec<usize>, out: &mut Vec<SequenceTerm>) {
    if left == 0 {
        out.push(SequenceTerm {
            z: cur.clone(),
            c: multiplicity_factor(cur),
            q: cur.len(),
        });
        return;
    }
    for v in min..=n.min(left) {
        cur.push(v);
        walk(n, left - v, v, cur, out);
        cur.pop();
    }
}

fn multiplicity_factor(z: &[usize]) -> u64 {
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for &v in z {
        *counts.entry(v).or_default() += 1;
    }
    counts.values().map(|&k| (1..=k).product::<u64>()).product()
}

/// `{…{g, F_{z₁}}, …, F_{z_q}}` with `fs[j-1]` playing `F_j`.
pub fn nested_bracket(g: &Kernel, z: &[usize], fs: &[Kernel]) -> Result<Kernel> {
    let mut acc = g.clone();
    for &j in z {
        if acc.is_empty() {
            break;
        }
        acc = acc.bracket(&fs[j - 1])?;
    }
    Ok(acc)
}

/// `R_n^m(g) = Σ_{z} {g, F_z}^{q(z)} / c_z` over [`sequences`]`(n, m)`.
pub fn truncation_term(g: &Kernel, n: usize, m: usize, fs: &[Kernel]) -> Result<Kernel> {
    if fs.len() < n {
        return Err(Error::InvalidArgument(format!(
            "need {n} generators, got {}",
            fs.len()
        )));
    }
    let mut total = g.filter(|_, _| false);
    for s in sequences(n, m) {
        let b = nested_bracket(g, &s.z, fs)?;
        total.add_scaled(&b, &BigRational::new(BigInt::from(1), BigInt::from(s.c)))?;
    }
    Ok(total)
}

/// `g ∘ F = g + Σ_{n≥1} {g, F}^n / n!`, truncated at the cutoff.
pub fn taylor_compose(g: &Kernel, f: &Kernel) -> Result<Kernel> {
    g.same_space(f)?;
    if !f.is_empty() && f.min_degree() <= 2 {
        return Err(Error::NonTerminating(f.min_degree()));
    }
    let mut total = g.clone();
    let mut term = g.clone();
    let mut n = 1i64;
    loop {
        term = term.bracket(f)?;
        if term.is_empty() {
            break;
        }
        term = term.scale_rational(&BigRational::new(BigInt::from(1), BigInt::from(n)));
        total.add_assign(&term)?;
        n += 1;
    }
    Ok(total)
}

#[derive(Debug, Clone)]
pub struct BirkhoffRun {
    /// The Hamiltonian after `m` steps, truncated at the cutoff.
    pub normal_form: Kernel,
    /// `F_1, …, F_m`.
    pub generators: Vec<Kernel>,
}

/// The generator of step `i` from the closed recursion
/// `F_i = G(R_{i−1}^{i}(h0) + R_{i−1}^{i−1}(h1))`, given `F_1..F_{i−1}`.
pub fn generator_by_recursion(i: usize, previous: &[Kernel], cfg: &EvalConfig) -> Result<Kernel> {
    let n = i - 1;
    let a = truncation_term(&h0(cfg.lattice, cfg.cutoff), n, i, previous)?;
    let b = truncation_term(&h1(cfg.lattice, cfg.cutoff), n, n, previous)?;
    let block = 2 * i + 2;
    Ok(phase_generator(&a.add(&b)?.slice(block), &cfg.resonance))
}

/// `m` Birkhoff steps at cutoff `2ℓ`. Each generator is computed from the
/// current Hamiltonian's degree-`(2i+2)` slice and checked against
/// [`generator_by_recursion`].
pub fn birkhoff_iterate(m: usize, ell: usize, cfg: &EvalConfig) -> Result<BirkhoffRun> {
    if m == 0 || ell <= m {
        return Err(Error::InvalidArgument(format!(
            "need 0 < m < ell, got m={m} ell={ell}"
        )));
    }
    if cfg.cutoff != 2 * ell {
        return Err(Error::Mismatch(format!(
            "cutoff {} but ell = {ell}",
            cfg.cutoff
        )));
    }
    let mut ham = h0(cfg.lattice, cfg.cutoff).add(&h1(cfg.lattice, cfg.cutoff))?;
    let mut generators: Vec<Kernel> = Vec::new();
    for i in 1..=m {
        let block = 2 * i + 2;
        let f = phase_generator(&ham.slice(block), &cfg.resonance);
        let again = generator_by_recursion(i, &generators, cfg)?;
        if again != f {
            return Err(Error::Inconsistent(format!(
                "step {i}: generator from the slice and from the recursion differ"
            )));
        }
        ham = taylor_compose(&ham, &f)?;
        generators.push(f);
    }
    Ok(BirkhoffRun {
        normal_form: ham,
        generators,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DiffTerm {
    pub monomial: String,
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiffReport {
    pub equal: bool,
    /// `left − right`.
    pub residual: Kernel,
    /// Up to ten residual monomials, largest `|re|+|im|` first.
    pub worst_monomials: Vec<DiffTerm>,
}

pub fn compare(a: &Kernel, b: &Kernel) -> Result<DiffReport> {
    let residual = a.sub(b)?;
    let mut worst: Vec<(&Monomial, &Coeff)> = residual.iter().collect();
    worst.sort_by(|x, y| y.1.l1().cmp(&x.1.l1()).then_with(|| x.0.cmp(y.0)));
    let zero = Coeff::zero();
    let worst_monomials = worst
        .into_iter()
        .take(10)
        .map(|(m, _)| DiffTerm {
            monomial: m.to_string(),
            left: a.get(m).unwrap_or(&zero).to_string(),
            right: b.get(m).unwrap_or(&zero).to_string(),
        })
        .collect();
    Ok(DiffReport {
        equal: residual.is_empty(),
        residual,
        worst_monomials,
    })
}
