use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest supported spatial dimension. Unused coordinates stay zero.
pub const MAX_DIM: usize = 3;

/// An integer Fourier mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Mode(pub [i16; MAX_DIM]);

impl Mode {
    pub fn d1(k: i16) -> Self {
        Mode([k, 0, 0])
    }

    pub fn from_slice(c: &[i64]) -> Result<Self> {
        if c.len() > MAX_DIM {
            return Err(Error::InvalidArgument(format!(
                "mode {c:?} has more than {MAX_DIM} coordinates"
            )));
        }
        let mut m = [0i16; MAX_DIM];
        for (slot, &x) in m.iter_mut().zip(c) {
            *slot = i16::try_from(x)
                .map_err(|_| Error::InvalidArgument(format!("mode coordinate {x} out of range")))?;
        }
        Ok(Mode(m))
    }

    pub fn norm2(&self) -> i64 {
        self.0.iter().map(|&x| (x as i64) * (x as i64)).sum()
    }

    pub fn add(&self, o: &Mode) -> Mode {
        let mut r = self.0;
        for (a, b) in r.iter_mut().zip(o.0) {
            *a += b;
        }
        Mode(r)
    }

    pub fn sub(&self, o: &Mode) -> Mode {
        let mut r = self.0;
        for (a, b) in r.iter_mut().zip(o.0) {
            *a -= b;
        }
        Mode(r)
    }

    pub fn coords(&self, dim: usize) -> Vec<i64> {
        self.0[..dim].iter().map(|&x| x as i64).collect()
    }
}

/// Modes with every coordinate in `[-radius, radius]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeLattice {
    pub dim: usize,
    pub radius: i16,
}

impl ModeLattice {
    pub fn new(dim: usize, radius: i64) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidArgument(format!(
                "dimension {dim} outside 1..={MAX_DIM}"
            )));
        }
        let radius = i16::try_from(radius)
            .ok()
            .filter(|r| *r >= 0 && *r < 100)
            .ok_or_else(|| Error::InvalidArgument(format!("radius {radius} outside 0..100")))?;
        Ok(ModeLattice { dim, radius })
    }

    pub fn contains(&self, m: &Mode) -> bool {
        m.0.iter().enumerate().all(|(i, &x)| {
            if i < self.dim {
                x.abs() <= self.radius
            } else {
                x == 0
            }
        })
    }

    /// All modes in lexicographic order.
    pub fn modes(&self) -> Vec<Mode> {
        let mut out = vec![Mode::default()];
        for axis in 0..self.dim {
            out = out
                .into_iter()
                .flat_map(|m| {
                    (-self.radius..=self.radius).map(move |x| {
                        let mut c = m.0;
                        c[axis] = x;
                        Mode(c)
                    })
                })
                .collect();
        }
        out.sort();
        out
    }
}

/// `u_{a₁}⋯u_{a_n} ū_{b₁}⋯ū_{b_n}` stored as two sorted multisets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    u: Vec<Mode>,
    ubar: Vec<Mode>,
}

impl Monomial {
    pub fn new(mut u: Vec<Mode>, mut ubar: Vec<Mode>) -> Self {
        u.sort_unstable();
        ubar.sort_unstable();
        Monomial { u, ubar }
    }

    /// Shorthand for one-dimensional modes.
    pub fn d1(u: &[i16], ubar: &[i16]) -> Self {
        Monomial::new(
            u.iter().map(|&k| Mode::d1(k)).collect(),
            ubar.iter().map(|&k| Mode::d1(k)).collect(),
        )
    }

    pub fn u(&self) -> &[Mode] {
        &self.u
    }

    pub fn ubar(&self) -> &[Mode] {
        &self.ubar
    }

    pub fn degree(&self) -> usize {
        self.u.len() + self.ubar.len()
    }

    /// `Σ_u |k|² − Σ_ū |k|²`.
    pub fn phase(&self) -> i64 {
        self.u.iter().map(Mode::norm2).sum::<i64>() - self.ubar.iter().map(Mode::norm2).sum::<i64>()
    }

    /// `Σ_u k − Σ_ū k`.
    pub fn momentum(&self) -> Mode {
        let s = self.u.iter().fold(Mode::default(), |acc, k| acc.add(k));
        self.ubar.iter().fold(s, |acc, k| acc.sub(k))
    }

    pub fn u_mult(&self, k: &Mode) -> usize {
        mult(&self.u, k)
    }

    pub fn ubar_mult(&self, k: &Mode) -> usize {
        mult(&self.ubar, k)
    }

    pub(crate) fn from_sorted(u: Vec<Mode>, ubar: Vec<Mode>) -> Self {
        debug_assert!(u.windows(2).all(|w| w[0] <= w[1]));
        debug_assert!(ubar.windows(2).all(|w| w[0] <= w[1]));
        Monomial { u, ubar }
    }
}

fn mult(v: &[Mode], k: &Mode) -> usize {
    let lo = v.partition_point(|x| x < k);
    v[lo..].iter().take_while(|x| *x == k).count()
}

/// Lower degree first, then the u part, then the ū part.
impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree()
            .cmp(&o.degree())
            .then_with(|| self.u.cmp(&o.u))
            .then_with(|| self.ubar.cmp(&o.ubar))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &[Mode]| {
            v.iter()
                .map(|m| {
                    let c: Vec<String> = m.0.iter().map(|x| x.to_string()).collect();
                    if m.0[1..].iter().all(|&x| x == 0) {
                        c[0].clone()
                    } else {
                        format!("({})", c.join(","))
                    }
                })
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "u[{}] ū[{}]", show(&self.u), show(&self.ubar))
    }
}

/// Sorted merge of two sorted slices.
pub(crate) fn merge_sorted(a: &[Mode], b: &[Mode]) -> Vec<Mode> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Copy of a sorted slice with one occurrence of `k` removed.
pub(crate) fn remove_one(v: &[Mode], k: &Mode) -> Vec<Mode> {
    let pos = v.partition_point(|x| x < k);
    let mut out = Vec::with_capacity(v.len() - 1);
    out.extend_from_slice(&v[..pos]);
    out.extend_from_slice(&v[pos + 1..]);
    out
}
