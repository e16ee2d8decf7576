//! Exact rational square matrices stored as an integer matrix over a common
//! denominator. Products never divide, so word evaluation stays in integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    dim: usize,
    /// Row-major numerators.
    num: Vec<BigInt>,
    /// Positive common denominator.
    den: BigInt,
}

impl ExactMatrix {
    /// Builds a matrix from row-major `(numerator, denominator)` pairs.
    pub fn from_fractions(dim: usize, entries: &[(BigInt, BigInt)]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Parse(format!("expected {} exact entries, got {}", dim * dim, entries.len())));
        }
        let mut den = BigInt::one();
        for (_, d) in entries {
            if d.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            den = den.lcm(&d.abs());
        }
        let num = entries
            .iter()
            .map(|(n, d)| {
                let scaled = n * (&den / d.abs());
                if d.is_negative() {
                    -scaled
                } else {
                    scaled
                }
            })
            .collect();
        Ok(Self { dim, num, den }.reduced())
    }

    pub fn from_integers(dim: usize, entries: &[i64]) -> Result<Self> {
        let pairs: Vec<_> = entries.iter().map(|&e| (BigInt::from(e), BigInt::one())).collect();
        Self::from_fractions(dim, &pairs)
    }

    /// Exact rational value of each `f64` entry (every finite double is dyadic).
    pub fn from_f64(dim: usize, entries: &[f64]) -> Option<Self> {
        let mut pairs = Vec::with_capacity(entries.len());
        for &x in entries {
            if !x.is_finite() {
                return None;
            }
            let (mantissa, exponent, sign) = num_traits::float::FloatCore::integer_decode(x);
            let m = BigInt::from(mantissa) * BigInt::from(sign);
            if exponent >= 0 {
                pairs.push((m << exponent as usize, BigInt::one()));
            } else {
                pairs.push((m, BigInt::one() << (-exponent) as usize));
            }
        }
        Self::from_fractions(dim, &pairs).ok()
    }

    pub fn identity(dim: usize) -> Self {
        let mut num = vec![BigInt::zero(); dim * dim];
        for i in 0..dim {
            num[i * dim + i] = BigInt::one();
        }
        Self { dim, num, den: BigInt::one() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> (BigInt, BigInt) {
        let g = self.num[i * self.dim + j].gcd(&self.den);
        if g.is_zero() {
            return (BigInt::zero(), BigInt::one());
        }
        (&self.num[i * self.dim + j] / &g, &self.den / &g)
    }

    /// Divides out the common factor of all numerators and the denominator.
    pub fn reduced(mut self) -> Self {
        let mut g = self.den.clone();
        for n in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(n);
        }
        if !g.is_one() && !g.is_zero() {
            for n in &mut self.num {
                *n /= &g;
            }
            self.den /= &g;
        }
        self
    }

    pub fn mul(&self, rhs: &ExactMatrix) -> ExactMatrix {
        let n = self.dim;
        let mut num = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.num[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    num[i * n + j] += a * &rhs.num[k * n + j];
                }
            }
        }
        ExactMatrix { dim: n, num, den: &self.den * &rhs.den }
    }

    /// Inverse of a determinant-one 2x2 matrix (the adjugate).
    pub fn sl2_inverse(&self) -> ExactMatrix {
        let [a, b, c, d] = [&self.num[0], &self.num[1], &self.num[2], &self.num[3]];
        ExactMatrix { dim: 2, num: vec![d.clone(), -b, -c, a.clone()], den: self.den.clone() }
    }

    /// Inverse of a Lorentz matrix: `J L^T J` with `J = diag(1, ..., 1, -1)`.
    pub fn lorentz_inverse(&self) -> ExactMatrix {
        let n = self.dim;
        let mut num = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let s = if (i == n - 1) != (j == n - 1) { -1 } else { 1 };
                num[i * n + j] = &self.num[j * n + i] * s;
            }
        }
        ExactMatrix { dim: n, num, den: self.den.clone() }
    }

    /// `(numerator, denominator)` of the trace.
    pub fn trace(&self) -> (BigInt, BigInt) {
        let t: BigInt = (0..self.dim).map(|i| &self.num[i * self.dim + i]).sum();
        (t, self.den.clone())
    }

    /// Determinant of a 2x2 matrix as `(numerator, denominator)`.
    pub fn det2(&self) -> (BigInt, BigInt) {
        (&self.num[0] * &self.num[3] - &self.num[1] * &self.num[2], &self.den * &self.den)
    }

    /// True when the matrix equals `sign * I`.
    pub fn is_scalar_identity(&self, sign: i32) -> bool {
        let n = self.dim;
        let target = &self.den * sign;
        (0..n).all(|i| {
            (0..n).all(|j| {
                let e = &self.num[i * n + j];
                if i == j {
                    *e == target
                } else {
                    e.is_zero()
                }
            })
        })
    }

    /// Checks `L^T J L = J` exactly.
    pub fn preserves_minkowski(&self) -> bool {
        let n = self.dim;
        let d2 = &self.den * &self.den;
        for i in 0..n {
            for j in 0..n {
                let mut s = BigInt::zero();
                for k in 0..n {
                    let p = &self.num[k * n + i] * &self.num[k * n + j];
                    if k == n - 1 {
                        s -= p;
                    } else {
                        s += p;
                    }
                }
                let want = if i != j {
                    BigInt::zero()
                } else if i == n - 1 {
                    -d2.clone()
                } else {
                    d2.clone()
                };
                if s != want {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.num.iter().map(|n| ratio_to_f64(n, &self.den)).collect()
    }
}

/// Floating value of `n / d` that survives numerators beyond the `f64` range.
pub fn ratio_to_f64(n: &BigInt, d: &BigInt) -> f64 {
    match (n.to_f64(), d.to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a / b,
        _ => {
            let shift = n.bits().max(d.bits()).saturating_sub(900) as usize;
            let a = (n >> shift).to_f64().unwrap_or(0.0);
            let b = (d >> shift).to_f64().unwrap_or(1.0);
            a / b
        }
    }
}

/// Sign of `a/b - c/d` for positive denominators.
pub fn cmp_fractions(a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> std::cmp::Ordering {
    (a * d).cmp(&(c * b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn common_denominator_and_reduction() {
        let m = ExactMatrix::from_fractions(
            2,
            &[
                (BigInt::from(1), BigInt::from(2)),
                (BigInt::from(1), BigInt::from(3)),
                (BigInt::from(0), BigInt::from(1)),
                (BigInt::from(2), BigInt::from(1)),
            ],
        )
        .unwrap();
        assert_eq!(m.entry(0, 0), (BigInt::from(1), BigInt::from(2)));
        assert_eq!(m.entry(0, 1), (BigInt::from(1), BigInt::from(3)));
        assert_eq!(m.entry(1, 1), (BigInt::from(2), BigInt::from(1)));
        assert_eq!(m.det2(), (BigInt::from(36), BigInt::from(36)));
    }

    #[test]
    fn sanov_commutator() {
        let a = ExactMatrix::from_integers(2, &[1, 2, 0, 1]).unwrap();
        let b = ExactMatrix::from_integers(2, &[1, 0, 2, 1]).unwrap();
        let c = a.mul(&b).mul(&a.sl2_inverse()).mul(&b.sl2_inverse());
        // [[5,2],[2,1]] [[1,-2],[0,1]] [[1,0],[-2,1]] by hand
        assert_eq!(c, ExactMatrix::from_integers(2, &[21, -8, 8, -3]).unwrap());
        assert!(a.mul(&a.sl2_inverse()).is_scalar_identity(1));
    }

    #[test]
    fn dyadic_import_is_exact() {
        let m = ExactMatrix::from_f64(2, &[0.5, 0.25, -3.0, 1.0]).unwrap();
        assert_eq!(m.entry(0, 1), (BigInt::from(1), BigInt::from(4)));
        assert_eq!(m.to_f64(), vec![0.5, 0.25, -3.0, 1.0]);
    }

    #[test]
    fn huge_ratio_to_f64() {
        let n = BigInt::from(3) << 2000usize;
        let d = BigInt::from(2) << 2000usize;
        assert!((ratio_to_f64(&n, &d) - 1.5).abs() < 1e-15);
    }
}
