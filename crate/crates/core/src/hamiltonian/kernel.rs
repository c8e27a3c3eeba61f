use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::coefficient::Coeff;
use super::monomial::{merge_sorted, remove_one, Mode, ModeLattice, Monomial};
use crate::error::{Error, Result};

/// A polynomial Hamiltonian: exact coefficients on monomials of degree at
/// most `max_degree`, all modes inside `lattice`. Zero coefficients are never
/// stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Kernel {
    lattice: ModeLattice,
    max_degree: usize,
    terms: BTreeMap<Monomial, Coeff>,
}

impl Kernel {
    pub fn zero(lattice: ModeLattice, max_degree: usize) -> Self {
        Kernel {
            lattice,
            max_degree,
            terms: BTreeMap::new(),
        }
    }

    /// Sums repeated monomials and drops zeros and terms above the cutoff.
    pub fn from_terms(
        lattice: ModeLattice,
        max_degree: usize,
        terms: impl IntoIterator<Item = (Monomial, Coeff)>,
    ) -> Result<Self> {
        let mut k = Kernel::zero(lattice, max_degree);
        for (m, c) in terms {
            k.add_term(m, &c)?;
        }
        Ok(k)
    }

    pub fn lattice(&self) -> ModeLattice {
        self.lattice
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn get(&self, m: &Monomial) -> Option<&Coeff> {
        self.terms.get(m)
    }

    pub fn add_term(&mut self, m: Monomial, c: &Coeff) -> Result<()> {
        if let Some(bad) = m
            .u()
            .iter()
            .chain(m.ubar())
            .find(|k| !self.lattice.contains(k))
        {
            return Err(Error::InvalidArgument(format!(
                "mode {bad:?} outside the lattice"
            )));
        }
        if m.u().len() != m.ubar().len() || m.u().is_empty() {
            return Err(Error::InvalidArgument(format!("unbalanced monomial {m}")));
        }
        if m.degree() > self.max_degree {
            return Ok(());
        }
        accumulate(&mut self.terms, m, c);
        Ok(())
    }

    /// Highest monomial degree present; 0 for the empty kernel.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Lowest monomial degree present; 0 for the empty kernel.
    pub fn min_degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).min().unwrap_or(0)
    }

    pub fn same_space(&self, o: &Kernel) -> Result<()> {
        if self.lattice != o.lattice || self.max_degree != o.max_degree {
            return Err(Error::Mismatch(format!(
                "{:?}/cutoff {} vs {:?}/cutoff {}",
                self.lattice, self.max_degree, o.lattice, o.max_degree
            )));
        }
        Ok(())
    }

    /// Keeps the terms for which `keep` holds.
    pub fn filter(&self, mut keep: impl FnMut(&Monomial, &Coeff) -> bool) -> Kernel {
        Kernel {
            lattice: self.lattice,
            max_degree: self.max_degree,
            terms: self
                .terms
                .iter()
                .filter(|(m, c)| keep(m, c))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Applies `f` to every coefficient, dropping results that vanish.
    pub fn map_coeffs(&self, mut f: impl FnMut(&Monomial, &Coeff) -> Coeff) -> Kernel {
        Kernel {
            lattice: self.lattice,
            max_degree: self.max_degree,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), f(m, c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// Terms of exactly this degree.
    pub fn slice(&self, degree: usize) -> Kernel {
        self.filter(|m, _| m.degree() == degree)
    }

    /// Same terms, different cutoff (terms above it are dropped).
    pub fn with_cutoff(&self, max_degree: usize) -> Kernel {
        let mut k = self.filter(|m, _| m.degree() <= max_degree);
        k.max_degree = max_degree;
        k
    }

    pub fn scale(&self, c: &Coeff) -> Kernel {
        self.map_coeffs(|_, x| x * c)
    }

    pub fn scale_rational(&self, r: &BigRational) -> Kernel {
        self.map_coeffs(|_, x| x.scale(r))
    }

    pub fn neg(&self) -> Kernel {
        self.map_coeffs(|_, x| -x)
    }

    pub fn add(&self, o: &Kernel) -> Result<Kernel> {
        let mut k = self.clone();
        k.add_assign(o)?;
        Ok(k)
    }

    pub fn sub(&self, o: &Kernel) -> Result<Kernel> {
        self.add(&o.neg())
    }

    pub fn add_assign(&mut self, o: &Kernel) -> Result<()> {
        self.same_space(o)?;
        for (m, c) in &o.terms {
            accumulate(&mut self.terms, m.clone(), c);
        }
        Ok(())
    }

    /// `self += factor · o`.
    pub fn add_scaled(&mut self, o: &Kernel, factor: &BigRational) -> Result<()> {
        self.same_space(o)?;
        for (m, c) in &o.terms {
            accumulate(&mut self.terms, m.clone(), &c.scale(factor));
        }
        Ok(())
    }

    /// Re-applies every invariant. Kernels built through this API already
    /// satisfy them, so this is the identity on them.
    pub fn canonicalize(&self) -> Kernel {
        self.filter(|m, c| !c.is_zero() && m.degree() <= self.max_degree)
    }

    /// `{self, o} = i Σ_k (∂_{u_k} self · ∂_{ū_k} o − ∂_{u_k} o · ∂_{ū_k} self)`,
    /// with terms above the cutoff never formed.
    pub fn bracket(&self, o: &Kernel) -> Result<Kernel> {
        self.same_space(o)?;
        let mut acc: HashMap<Monomial, Coeff> = HashMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                if ma.degree() + mb.degree() - 2 > self.max_degree {
                    continue;
                }
                bracket_monomials(ma, mb, |m, w| {
                    let c = (ca * cb).scale_int(w).mul_i();
                    match acc.get_mut(&m) {
                        Some(x) => *x += &c,
                        None => {
                            acc.insert(m, c);
                        }
                    }
                });
            }
        }
        Ok(Kernel {
            lattice: self.lattice,
            max_degree: self.max_degree,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }
}

fn accumulate(terms: &mut BTreeMap<Monomial, Coeff>, m: Monomial, c: &Coeff) {
    use std::collections::btree_map::Entry;
    match terms.entry(m) {
        Entry::Vacant(e) => {
            if !c.is_zero() {
                e.insert(c.clone());
            }
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// Calls `emit(monomial, w)` for each term of `{a, b} / i` with integer
/// weight `w`. Contracting mode `k` leaves `(U − k, V − k)` where `U`, `V` are
/// the merged u and ū parts, with weight `μ_a(k)ν_b(k) − μ_b(k)ν_a(k)`
/// (μ, ν the u and ū multiplicities).
pub(crate) fn bracket_monomials(a: &Monomial, b: &Monomial, mut emit: impl FnMut(Monomial, i64)) {
    let u = merge_sorted(a.u(), b.u());
    let v = merge_sorted(a.ubar(), b.ubar());
    let mut last: Option<Mode> = None;
    for k in &u {
        if last == Some(*k) {
            continue;
        }
        last = Some(*k);
        let w = (a.u_mult(k) * b.ubar_mult(k)) as i64 - (b.u_mult(k) * a.ubar_mult(k)) as i64;
        if w != 0 {
            emit(
                Monomial::from_sorted(remove_one(&u, k), remove_one(&v, k)),
                w,
            );
        }
    }
}

pub fn poisson_bracket(a: &Kernel, b: &Kernel) -> Result<Kernel> {
    a.bracket(b)
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Debug, Clone, Serialize, Deserialize)]
struct KernelRepr {
    dim: usize,
    radius: i64,
    max_degree: usize,
    terms: Vec<TermRepr>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TermRepr {
    u: Vec<Vec<i64>>,
    ubar: Vec<Vec<i64>>,
    re: String,
    im: String,
}

impl Serialize for Kernel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let dim = self.lattice.dim;
        KernelRepr {
            dim,
            radius: self.lattice.radius as i64,
            max_degree: self.max_degree,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermRepr {
                    u: m.u().iter().map(|k| k.coords(dim)).collect(),
                    ubar: m.ubar().iter().map(|k| k.coords(dim)).collect(),
                    re: c.re.to_string(),
                    im: c.im.to_string(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Kernel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = KernelRepr::deserialize(d)?;
        let lattice = ModeLattice::new(r.dim, r.radius).map_err(D::Error::custom)?;
        let mut k = Kernel::zero(lattice, r.max_degree);
        for t in r.terms {
            let modes = |v: &[Vec<i64>]| -> std::result::Result<Vec<Mode>, D::Error> {
                v.iter()
                    .map(|c| {
                        if c.len() != r.dim {
                            return Err(D::Error::custom(format!(
                                "mode {c:?} has wrong dimension"
                            )));
                        }
                        Mode::from_slice(c).map_err(D::Error::custom)
                    })
                    .collect()
            };
            let m = Monomial::new(modes(&t.u)?, modes(&t.ubar)?);
            let c = Coeff::new(
                parse_rational(&t.re).map_err(D::Error::custom)?,
                parse_rational(&t.im).map_err(D::Error::custom)?,
            );
            if m.degree() > r.max_degree {
                return Err(D::Error::custom(format!("monomial {m} above max_degree")));
            }
            k.add_term(m, &c).map_err(D::Error::custom)?;
        }
        Ok(k)
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidArgument(format!("not a rational: {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}
