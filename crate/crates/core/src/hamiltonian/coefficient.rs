use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact Gaussian rational `re + i·im`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Coeff {
    pub re: BigRational,
    pub im: BigRational,
}

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

impl Coeff {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Coeff { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Coeff {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn imag(im: BigRational) -> Self {
        Coeff {
            re: BigRational::zero(),
            im,
        }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Coeff::new(rat(re, 1), rat(im, 1))
    }

    pub fn one() -> Self {
        Coeff::real(BigRational::one())
    }

    pub fn i() -> Self {
        Coeff::imag(BigRational::one())
    }

    pub fn zero() -> Self {
        Coeff::default()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Coeff {
            re: &self.re * r,
            im: &self.im * r,
        }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        let k = BigInt::from(k);
        Coeff {
            re: BigRational::new(self.re.numer() * &k, self.re.denom().clone()),
            im: BigRational::new(self.im.numer() * &k, self.im.denom().clone()),
        }
    }

    /// Multiply by `i`.
    pub fn mul_i(&self) -> Self {
        Coeff {
            re: -&self.im,
            im: self.re.clone(),
        }
    }

    /// `|re| + |im|`, a cheap size for ordering residuals.
    pub fn l1(&self) -> BigRational {
        self.re.abs() + self.im.abs()
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) if self.im.is_negative() => write!(f, "{}-{}i", self.re, -&self.im),
            (false, false) => write!(f, "{}+{}i", self.re, self.im),
        }
    }
}

impl Add for &Coeff {
    type Output = Coeff;
    fn add(self, o: &Coeff) -> Coeff {
        Coeff {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl Sub for &Coeff {
    type Output = Coeff;
    fn sub(self, o: &Coeff) -> Coeff {
        Coeff {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl Mul for &Coeff {
    type Output = Coeff;
    fn mul(self, o: &Coeff) -> Coeff {
        Coeff {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl AddAssign<&Coeff> for Coeff {
    fn add_assign(&mut self, o: &Coeff) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let a = Coeff::new(rat(1, 2), rat(-1, 3));
        let b = Coeff::new(rat(2, 1), rat(1, 4));
        assert_eq!(
            &a * &b,
            Coeff::new(rat(1, 1) + rat(1, 12), rat(1, 8) - rat(2, 3))
        );
        assert_eq!(&a + &(-&a), Coeff::zero());
        assert_eq!(a.mul_i(), &a * &Coeff::i());
        assert_eq!(a.scale_int(-6), Coeff::new(rat(-3, 1), rat(2, 1)));
        assert_eq!(
            &(&Coeff::i() * &Coeff::i()) - &Coeff::from_ints(-1, 0),
            Coeff::zero()
        );
    }

    #[test]
    fn display() {
        assert_eq!(Coeff::new(rat(1, 2), rat(-1, 3)).to_string(), "1/2-1/3i");
        assert_eq!(Coeff::imag(rat(1, 4)).to_string(), "1/4i");
        assert_eq!(Coeff::zero().to_string(), "0");
    }
}
