//! Isometries of `H^n` given as `SL(2,R)`, `SL(2,C)` or Lorentz matrices, their
//! classification into hyperbolic, parabolic and elliptic, and word evaluation.
//!
//! Every isometry carries its Lorentz matrix acting on hyperboloid coordinates.
//! `SL(2)` matrices act on Hermitian matrices `P -> A P A^*`, where the point with
//! coordinates `(x0, x1[, x2], t)` is `[[t + x0, x1 + i x2], [x1 - i x2, t - x0]]`.
//! Under this identification `i` in the upper half-plane is the origin and the
//! imaginary axis is the `x0`-axis.

use std::fmt;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exact::{cmp_fractions, ExactMatrix};
use crate::geometry::{distance, minkowski, GeodesicLine, IdealPoint, SpacePoint};
use crate::word::Word;

/// Tolerance on the model invariant (determinant or Minkowski form).
pub const TOL_MATRIX: f64 = 1e-9;
/// Minimal spectral gap accepted by classification.
pub const TOL_CLASSIFY: f64 = 1e-9;
/// Below this estimated translation length, Lorentz-matrix eigenvalues cannot
/// separate hyperbolic from parabolic (a 3x3 Jordan block perturbs by ~u^(1/3)).
const TOL_JORDAN: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// Lorentz matrix of size `(n+1) x (n+1)` acting on `H^n`.
    Hyperboloid(usize),
    Sl2Real,
    Sl2Complex,
}

impl Model {
    /// Dimension of the hyperbolic space acted on.
    pub fn space_dim(self) -> usize {
        match self {
            Model::Hyperboloid(n) => n,
            Model::Sl2Real => 2,
            Model::Sl2Complex => 3,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Model::Hyperboloid(_) => "hyperboloid-n",
            Model::Sl2Real => "sl2-real",
            Model::Sl2Complex => "sl2-complex",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Hyperboloid(n) => write!(f, "hyperboloid-{n}"),
            m => write!(f, "{}", m.tag()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Hyperbolic,
    Parabolic,
    Elliptic,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Kind::Hyperbolic => "hyperbolic",
            Kind::Parabolic => "parabolic",
            Kind::Elliptic => "elliptic",
        };
        f.write_str(s)
    }
}

/// Type, translation length and boundary data of an isometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsometryClass {
    pub kind: Kind,
    pub tau: f64,
    /// Oriented from repelling to attracting fixed point.
    pub axis: Option<GeodesicLine>,
    pub fixed_ideal: Vec<IdealPoint>,
}

#[derive(Debug, Clone)]
enum Source {
    Real([f64; 4]),
    Complex([Complex64; 4]),
    Lorentz(DMatrix<f64>),
}

#[derive(Debug, Clone)]
pub struct Isometry {
    model: Model,
    source: Source,
    lorentz: DMatrix<f64>,
    exact: Option<ExactMatrix>,
    class: OnceLock<Result<IsometryClass>>,
}

fn lorentz_from_real(m: &[f64; 4]) -> DMatrix<f64> {
    let [a, b, c, d] = *m;
    let mut l = DMatrix::zeros(3, 3);
    // basis vectors x0, x1, t as symmetric matrices [[p, q], [q, r]]
    let basis = [(1.0, 0.0, -1.0), (0.0, 1.0, 0.0), (1.0, 0.0, 1.0)];
    for (j, &(p, q, r)) in basis.iter().enumerate() {
        // A P A^T
        let m11 = a * (a * p + b * q) + b * (a * q + b * r);
        let m12 = a * (c * p + d * q) + b * (c * q + d * r);
        let m22 = c * (c * p + d * q) + d * (c * q + d * r);
        l[(0, j)] = (m11 - m22) / 2.0;
        l[(1, j)] = m12;
        l[(2, j)] = (m11 + m22) / 2.0;
    }
    l
}

fn lorentz_from_complex(m: &[Complex64; 4]) -> DMatrix<f64> {
    let a = nalgebra::Matrix2::new(m[0], m[1], m[2], m[3]);
    let astar = a.adjoint();
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let z = Complex64::new(0.0, 0.0);
    let basis = [
        nalgebra::Matrix2::new(one, z, z, -one),
        nalgebra::Matrix2::new(z, one, one, z),
        nalgebra::Matrix2::new(z, i, -i, z),
        nalgebra::Matrix2::new(one, z, z, one),
    ];
    let mut l = DMatrix::zeros(4, 4);
    for (j, p) in basis.iter().enumerate() {
        let q = a * p * astar;
        l[(0, j)] = (q[(0, 0)].re - q[(1, 1)].re) / 2.0;
        l[(1, j)] = q[(0, 1)].re;
        l[(2, j)] = q[(0, 1)].im;
        l[(3, j)] = (q[(0, 0)].re + q[(1, 1)].re) / 2.0;
    }
    l
}

fn minkowski_gram(l: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let mut j = DMatrix::identity(n, n);
    j[(n - 1, n - 1)] = -1.0;
    l.transpose() * &j * l - j
}

fn is_small_integer(x: f64) -> bool {
    x.fract() == 0.0 && x.abs() < 9.0e15
}

impl Isometry {
    pub fn sl2_real(m: [f64; 4]) -> Result<Self> {
        if !m.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidIsometry("non-finite entry".into()));
        }
        let det = m[0] * m[3] - m[1] * m[2];
        let scale = m.iter().fold(1.0f64, |s, x| s.max(x.abs()));
        if (det - 1.0).abs() > TOL_MATRIX * scale * scale {
            return Err(Error::InvalidIsometry(format!("determinant {det} != 1")));
        }
        // integral entries with exact unit determinant are taken as exact data
        let exact = if m.iter().all(|&x| is_small_integer(x)) {
            ExactMatrix::from_f64(2, &m).filter(|e| {
                let (n, d) = e.det2();
                n == d
            })
        } else {
            None
        };
        Ok(Self::build(Model::Sl2Real, Source::Real(m), exact))
    }

    /// Exact rational `SL(2,R)` element.
    pub fn sl2_exact(e: ExactMatrix) -> Result<Self> {
        if e.dim() != 2 {
            return Err(Error::InvalidIsometry("exact matrix must be 2x2".into()));
        }
        let (n, d) = e.det2();
        if n != d {
            return Err(Error::InvalidIsometry("exact determinant is not 1".into()));
        }
        let f = e.to_f64();
        Ok(Self::build(Model::Sl2Real, Source::Real([f[0], f[1], f[2], f[3]]), Some(e)))
    }

    pub fn sl2_complex(m: [Complex64; 4]) -> Result<Self> {
        if !m.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidIsometry("non-finite entry".into()));
        }
        let det = m[0] * m[3] - m[1] * m[2];
        let scale = m.iter().fold(1.0f64, |s, x| s.max(x.norm()));
        if (det - 1.0).norm() > TOL_MATRIX * scale * scale {
            return Err(Error::InvalidIsometry(format!("determinant {det} != 1")));
        }
        Ok(Self::build(Model::Sl2Complex, Source::Complex(m), None))
    }

    /// Lorentz matrix preserving the Minkowski form and the upper sheet.
    pub fn lorentz(l: DMatrix<f64>) -> Result<Self> {
        let n = l.nrows();
        if n < 3 || l.ncols() != n {
            return Err(Error::InvalidIsometry("Lorentz matrix must be square of size >= 3".into()));
        }
        if !l.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidIsometry("non-finite entry".into()));
        }
        let scale = l.amax().max(1.0);
        let err = minkowski_gram(&l).amax();
        if err > TOL_MATRIX * scale * scale {
            return Err(Error::InvalidIsometry(format!("matrix does not preserve the Minkowski form (error {err:e})")));
        }
        if l[(n - 1, n - 1)] <= 0.0 {
            return Err(Error::InvalidIsometry("matrix swaps the two sheets".into()));
        }
        let flat: Vec<f64> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| l[(i, j)]).collect();
        let exact = if flat.iter().all(|&x| is_small_integer(x)) {
            ExactMatrix::from_f64(n, &flat).filter(|e| e.preserves_minkowski())
        } else {
            None
        };
        Ok(Self::build(Model::Hyperboloid(n - 1), Source::Lorentz(l), exact))
    }

    pub fn lorentz_exact(e: ExactMatrix) -> Result<Self> {
        if !e.preserves_minkowski() {
            return Err(Error::InvalidIsometry("exact matrix does not preserve the Minkowski form".into()));
        }
        let n = e.dim();
        let l = DMatrix::from_row_slice(n, n, &e.to_f64());
        if l[(n - 1, n - 1)] <= 0.0 {
            return Err(Error::InvalidIsometry("matrix swaps the two sheets".into()));
        }
        Ok(Self::build(Model::Hyperboloid(n - 1), Source::Lorentz(l), Some(e)))
    }

    fn build(model: Model, source: Source, exact: Option<ExactMatrix>) -> Self {
        let lorentz = match &source {
            Source::Real(m) => lorentz_from_real(m),
            Source::Complex(m) => lorentz_from_complex(m),
            Source::Lorentz(l) => l.clone(),
        };
        Self { model, source, lorentz, exact, class: OnceLock::new() }
    }

    pub fn identity(model: Model) -> Self {
        match model {
            Model::Sl2Real => Self::build(model, Source::Real([1.0, 0.0, 0.0, 1.0]), Some(ExactMatrix::identity(2))),
            Model::Sl2Complex => {
                let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
                Self::build(model, Source::Complex([o, z, z, o]), None)
            }
            Model::Hyperboloid(n) => {
                Self::build(model, Source::Lorentz(DMatrix::identity(n + 1, n + 1)), Some(ExactMatrix::identity(n + 1)))
            }
        }
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn space_dim(&self) -> usize {
        self.model.space_dim()
    }

    pub fn lorentz_matrix(&self) -> &DMatrix<f64> {
        &self.lorentz
    }

    pub fn exact(&self) -> Option<&ExactMatrix> {
        self.exact.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Entries of the defining matrix (real part only for `sl2-complex`).
    pub fn real_entries(&self) -> Option<[f64; 4]> {
        match &self.source {
            Source::Real(m) => Some(*m),
            _ => None,
        }
    }

    pub fn complex_entries(&self) -> Option<[Complex64; 4]> {
        match &self.source {
            Source::Complex(m) => Some(*m),
            Source::Real(m) => Some(m.map(|x| Complex64::new(x, 0.0))),
            _ => None,
        }
    }

    fn check_model(&self, other: &Isometry) -> Result<()> {
        if self.model != other.model {
            return Err(Error::ModelMismatch(self.model.to_string(), other.model.to_string()));
        }
        Ok(())
    }

    /// The product `self * rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &Isometry) -> Result<Isometry> {
        self.check_model(rhs)?;
        let exact = match (&self.exact, &rhs.exact) {
            (Some(a), Some(b)) => Some(a.mul(b)),
            _ => None,
        };
        let source = match (&self.source, &rhs.source) {
            (Source::Real(a), Source::Real(b)) => match &exact {
                Some(e) => {
                    let f = e.to_f64();
                    Source::Real([f[0], f[1], f[2], f[3]])
                }
                None => Source::Real([
                    a[0] * b[0] + a[1] * b[2],
                    a[0] * b[1] + a[1] * b[3],
                    a[2] * b[0] + a[3] * b[2],
                    a[2] * b[1] + a[3] * b[3],
                ]),
            },
            (Source::Complex(a), Source::Complex(b)) => Source::Complex([
                a[0] * b[0] + a[1] * b[2],
                a[0] * b[1] + a[1] * b[3],
                a[2] * b[0] + a[3] * b[2],
                a[2] * b[1] + a[3] * b[3],
            ]),
            (Source::Lorentz(a), Source::Lorentz(b)) => match &exact {
                Some(e) => Source::Lorentz(DMatrix::from_row_slice(a.nrows(), a.nrows(), &e.to_f64())),
                None => Source::Lorentz(a * b),
            },
            _ => unreachable!("models checked above"),
        };
        Ok(Self::build(self.model, source, exact.map(ExactMatrix::reduced)))
    }

    pub fn inverse(&self) -> Isometry {
        let exact = self.exact.as_ref().map(|e| match self.model {
            Model::Hyperboloid(_) => e.lorentz_inverse(),
            _ => e.sl2_inverse(),
        });
        let source = match &self.source {
            Source::Real(m) => Source::Real([m[3], -m[1], -m[2], m[0]]),
            Source::Complex(m) => Source::Complex([m[3], -m[1], -m[2], m[0]]),
            Source::Lorentz(l) => {
                let n = l.nrows();
                let mut inv = l.transpose();
                for i in 0..n {
                    inv[(i, n - 1)] = -inv[(i, n - 1)];
                    inv[(n - 1, i)] = -inv[(n - 1, i)];
                }
                Source::Lorentz(inv)
            }
        };
        Self::build(self.model, source, exact)
    }

    /// `self^m` by repeated squaring.
    pub fn pow(&self, m: i64) -> Isometry {
        let mut base = if m < 0 { self.inverse() } else { self.clone() };
        let mut e = m.unsigned_abs();
        let mut acc = Isometry::identity(self.model);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base).expect("same model");
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base).expect("same model");
            }
        }
        acc
    }

    pub fn apply(&self, x: &SpacePoint) -> SpacePoint {
        self.try_apply(x).expect("Lorentz maps preserve the upper sheet")
    }

    /// `apply` for matrices whose rounding may have destroyed the image (huge entries).
    pub fn try_apply(&self, x: &SpacePoint) -> Result<SpacePoint> {
        SpacePoint::renormalize(&self.lorentz * x.coords())
    }

    pub fn apply_ideal(&self, xi: &IdealPoint) -> IdealPoint {
        IdealPoint::from_null(&self.lorentz * xi.coords())
    }

    pub fn apply_line(&self, l: &GeodesicLine) -> GeodesicLine {
        GeodesicLine { minus: self.apply_ideal(&l.minus), plus: self.apply_ideal(&l.plus) }
    }

    /// `d(x, g x)`.
    pub fn displacement(&self, x: &SpacePoint) -> f64 {
        distance(x, &self.apply(x))
    }

    /// `ln cosh d(x, g x)` from a rescaled matrix, finite even when the entries
    /// of a long word overflow `f64`.
    pub fn log_cosh_displacement(&self, x: &SpacePoint) -> f64 {
        let (scaled, ln_scale, quadratic) = self.scaled_source();
        let l = match &scaled {
            Source::Real(m) => lorentz_from_real(m),
            Source::Complex(m) => lorentz_from_complex(m),
            Source::Lorentz(l) => l.clone(),
        };
        let v = &l * x.coords();
        let xt = -minkowski(&v, x.coords());
        let factor = if quadratic { 2.0 } else { 1.0 };
        factor * ln_scale + xt.ln()
    }

    /// `d(x, g x)` that stays accurate for displacements far beyond the `f64` range of
    /// the matrix entries.
    pub fn displacement_robust(&self, x: &SpacePoint) -> f64 {
        let lc = self.log_cosh_displacement(x);
        if lc < 30.0 && self.lorentz.iter().all(|v| v.is_finite()) {
            return self.displacement(x);
        }
        if lc < 30.0 {
            return lc.exp().acosh();
        }
        // acosh(X) = ln X + ln(1 + sqrt(1 - X^-2))
        lc + (1.0 + (1.0 - (-2.0 * lc).exp()).sqrt()).ln()
    }

    /// Source entries divided by their largest modulus, with the log of that modulus.
    fn scaled_source(&self) -> (Source, f64, bool) {
        let quadratic = !matches!(self.source, Source::Lorentz(_));
        if let Some(e) = &self.exact {
            let n = e.dim();
            let entries: Vec<(BigInt, BigInt)> = (0..n * n).map(|k| e.entry(k / n, k % n)).collect();
            // common denominator cancels in the ratio to the largest entry
            let den = entries.iter().fold(BigInt::one(), |acc, (_, d)| num_integer::Integer::lcm(&acc, d));
            let nums: Vec<BigInt> = entries.iter().map(|(a, d)| a * (&den / d)).collect();
            let big = nums.iter().map(|a| a.abs()).max().unwrap_or_else(BigInt::one);
            let scaled: Vec<f64> = nums.iter().map(|a| crate::exact::ratio_to_f64(a, &big)).collect();
            let ln_scale = ln_bigint(&big) - ln_bigint(&den);
            let src = if quadratic {
                Source::Real([scaled[0], scaled[1], scaled[2], scaled[3]])
            } else {
                Source::Lorentz(DMatrix::from_row_slice(n, n, &scaled))
            };
            return (src, ln_scale, quadratic);
        }
        match &self.source {
            Source::Real(m) => {
                let s = m.iter().fold(0.0f64, |a, x| a.max(x.abs()));
                (Source::Real(m.map(|x| x / s)), s.ln(), true)
            }
            Source::Complex(m) => {
                let s = m.iter().fold(0.0f64, |a, x| a.max(x.norm()));
                (Source::Complex(m.map(|x| x / s)), s.ln(), true)
            }
            Source::Lorentz(l) => {
                let s = l.amax();
                (Source::Lorentz(l / s), s.ln(), false)
            }
        }
    }

    /// True when the isometry is the identity of `H^n` (exactly if possible).
    pub fn is_identity(&self, tol: f64) -> bool {
        if let Some(e) = &self.exact {
            return match self.model {
                Model::Hyperboloid(_) => e.is_scalar_identity(1),
                _ => e.is_scalar_identity(1) || e.is_scalar_identity(-1),
            };
        }
        self.distance_to_identity() < tol
    }

    /// Operator-norm style distance to the identity (to `+-I` in the `SL(2)` models).
    pub fn distance_to_identity(&self) -> f64 {
        match &self.source {
            Source::Real(m) => {
                let p = (m[0] - 1.0).abs().max(m[1].abs()).max(m[2].abs()).max((m[3] - 1.0).abs());
                let q = (m[0] + 1.0).abs().max(m[1].abs()).max(m[2].abs()).max((m[3] + 1.0).abs());
                p.min(q)
            }
            Source::Complex(m) => {
                let one = Complex64::new(1.0, 0.0);
                let p = (m[0] - one).norm().max(m[1].norm()).max(m[2].norm()).max((m[3] - one).norm());
                let q = (m[0] + one).norm().max(m[1].norm()).max(m[2].norm()).max((m[3] + one).norm());
                p.min(q)
            }
            Source::Lorentz(l) => {
                let n = l.nrows();
                (l - DMatrix::<f64>::identity(n, n)).norm()
            }
        }
    }

    /// Cached classification.
    pub fn classify(&self) -> Result<IsometryClass> {
        self.class.get_or_init(|| self.compute_class()).clone()
    }

    pub fn translation_length(&self) -> Result<f64> {
        Ok(self.classify()?.tau)
    }

    fn compute_class(&self) -> Result<IsometryClass> {
        match &self.source {
            Source::Real(m) => self.classify_real(m),
            Source::Complex(m) => classify_complex(m, self.complex_is_integral()),
            Source::Lorentz(l) => self.classify_lorentz(l),
        }
    }

    fn complex_is_integral(&self) -> bool {
        match &self.source {
            Source::Complex(m) => m.iter().all(|z| z.re.fract() == 0.0 && z.im.fract() == 0.0 && z.norm() < 1.0e6),
            _ => false,
        }
    }

    fn classify_real(&self, m: &[f64; 4]) -> Result<IsometryClass> {
        let t = m[0] + m[3];
        let gap = t.abs() - 2.0;
        let kind = if gap > TOL_CLASSIFY {
            Kind::Hyperbolic
        } else if gap < -TOL_CLASSIFY {
            Kind::Elliptic
        } else if let Some(e) = &self.exact {
            exact_sl2_kind(e)
        } else if self.distance_to_identity() < 1e-12 {
            Kind::Elliptic
        } else {
            return Err(Error::NumericallyAmbiguous { gap: gap.abs() });
        };
        let c = Complex64::new;
        let mc = m.map(|x| c(x, 0.0));
        match kind {
            Kind::Hyperbolic => {
                let (rep, att) = mobius_fixed_points(&mc);
                let tau = 2.0 * ((t.abs() + (t * t - 4.0).sqrt()) / 2.0).ln();
                let axis = GeodesicLine::new(
                    IdealPoint::from_boundary_real(rep.map(|z| z.re)),
                    IdealPoint::from_boundary_real(att.map(|z| z.re)),
                )?;
                Ok(IsometryClass { kind, tau, fixed_ideal: vec![axis.minus.clone(), axis.plus.clone()], axis: Some(axis) })
            }
            Kind::Parabolic => {
                let p = self.exact.as_ref().map(exact_parabolic_fixed_point).unwrap_or_else(|| parabolic_fixed_point(&mc));
                Ok(IsometryClass {
                    kind,
                    tau: 0.0,
                    axis: None,
                    fixed_ideal: vec![IdealPoint::from_boundary_real(p.map(|z| z.re))],
                })
            }
            Kind::Elliptic => Ok(IsometryClass { kind, tau: 0.0, axis: None, fixed_ideal: vec![] }),
        }
    }

    fn classify_lorentz(&self, l: &DMatrix<f64>) -> Result<IsometryClass> {
        let n = l.nrows();
        if self.distance_to_identity() < 1e-12 || self.exact.as_ref().is_some_and(|e| e.is_scalar_identity(1)) {
            return Ok(IsometryClass { kind: Kind::Elliptic, tau: 0.0, axis: None, fixed_ideal: vec![] });
        }
        if let (Some(e), 3) = (&self.exact, n) {
            // tr L = 1 + 2 cosh(tau) on SO+(2,1)
            let (tn, td) = e.trace();
            let three = BigInt::from(3);
            match cmp_fractions(&tn, &td, &three, &BigInt::one()) {
                std::cmp::Ordering::Greater => return lorentz_hyperbolic(l),
                std::cmp::Ordering::Less => {
                    return Ok(IsometryClass { kind: Kind::Elliptic, tau: 0.0, axis: None, fixed_ideal: vec![] })
                }
                std::cmp::Ordering::Equal => return lorentz_parabolic(l),
            }
        }
        let rho = l.clone().complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        let tau_est = rho.ln();
        if tau_est > TOL_JORDAN {
            return lorentz_hyperbolic(l);
        }
        // ker(L - I): timelike vectors there mean a fixed point in H^n.
        let scale = l.amax().max(1.0);
        let nm = l - DMatrix::<f64>::identity(n, n);
        let svd = nm.svd(false, true);
        let vt = svd.v_t.as_ref().expect("requested V^T");
        let kernel: Vec<DVector<f64>> = (0..n)
            .filter(|&i| svd.singular_values[i] < 1e-8 * scale)
            .map(|i| vt.row(i).transpose())
            .collect();
        if kernel.is_empty() {
            return if tau_est > TOL_CLASSIFY {
                lorentz_hyperbolic(l)
            } else {
                Err(Error::NumericallyAmbiguous { gap: tau_est })
            };
        }
        let k = kernel.len();
        let gram = DMatrix::from_fn(k, k, |i, j| minkowski(&kernel[i], &kernel[j]));
        let eig = gram.symmetric_eigen();
        let (imin, emin) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        if emin < -1e-6 {
            Ok(IsometryClass { kind: Kind::Elliptic, tau: 0.0, axis: None, fixed_ideal: vec![] })
        } else if emin.abs() <= 1e-6 {
            let coeff = eig.eigenvectors.column(imin);
            let mut v = DVector::zeros(n);
            for (i, kv) in kernel.iter().enumerate() {
                v += kv * coeff[i];
            }
            Ok(IsometryClass { kind: Kind::Parabolic, tau: 0.0, axis: None, fixed_ideal: vec![IdealPoint::from_null(v)] })
        } else if tau_est > TOL_CLASSIFY {
            lorentz_hyperbolic(l)
        } else {
            Err(Error::NumericallyAmbiguous { gap: tau_est })
        }
    }

    /// `h g h^-1` where `self = g`.
    pub fn conjugate_by(&self, h: &Isometry) -> Result<Isometry> {
        h.compose(self)?.compose(&h.inverse())
    }
}

/// Natural log of a positive big integer.
pub fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return num_traits::ToPrimitive::to_f64(n).unwrap_or(f64::NAN).ln();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift as usize;
    num_traits::ToPrimitive::to_f64(&top).unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

fn exact_sl2_kind(e: &ExactMatrix) -> Kind {
    if e.is_scalar_identity(1) || e.is_scalar_identity(-1) {
        return Kind::Elliptic;
    }
    let (tn, td) = e.trace();
    let two = BigInt::from(2) * &td;
    match tn.abs().cmp(&two) {
        std::cmp::Ordering::Greater => Kind::Hyperbolic,
        std::cmp::Ordering::Less => Kind::Elliptic,
        std::cmp::Ordering::Equal => Kind::Parabolic,
    }
}

/// Fixed point of a parabolic `[[a,b],[c,d]]`: infinity if `c = 0`, else `(a-d)/2c`.
fn exact_parabolic_fixed_point(e: &ExactMatrix) -> Option<Complex64> {
    let (cn, _) = e.entry(1, 0);
    if cn.is_zero() {
        return None;
    }
    let (an, ad) = e.entry(0, 0);
    let (dn, dd) = e.entry(1, 1);
    let (cn, cd) = e.entry(1, 0);
    // (a - d) / (2c)
    let num = (&an * &dd - &dn * &ad) * &cd;
    let den = &ad * &dd * &cn * BigInt::from(2);
    Some(Complex64::new(crate::exact::ratio_to_f64(&num, &den), 0.0))
}

fn parabolic_fixed_point(m: &[Complex64; 4]) -> Option<Complex64> {
    let scale = m.iter().fold(1.0f64, |s, z| s.max(z.norm()));
    if m[2].norm() <= 1e-15 * scale {
        None
    } else {
        Some((m[0] - m[3]) / (m[2] * 2.0))
    }
}

/// Repelling and attracting fixed points of a loxodromic Moebius map
/// (`None` is infinity).
fn mobius_fixed_points(m: &[Complex64; 4]) -> (Option<Complex64>, Option<Complex64>) {
    let [a, b, c, d] = *m;
    let t = a + d;
    let disc = (t * t - 4.0).sqrt();
    let dm = d - a;
    // c z^2 + (d - a) z - b = 0, stable form
    let s = if (dm.conj() * disc).re >= 0.0 { disc } else { -disc };
    let q = -(dm + s) / 2.0;
    let r1 = if c == Complex64::new(0.0, 0.0) { None } else { Some(q / c) };
    let r2 = if q.norm() == 0.0 { None } else { Some(-b / q) };
    // |derivative| = 1/|cz+d|^2 at finite z, |1/a^2| at infinity when c = 0
    let attracting = |z: Option<Complex64>| match z {
        Some(z) => (c * z + d).norm() > 1.0,
        None => a.norm() > 1.0,
    };
    if attracting(r1) {
        (r2, r1)
    } else {
        (r1, r2)
    }
}

fn classify_complex(m: &[Complex64; 4], integral: bool) -> Result<IsometryClass> {
    let t = m[0] + m[3];
    let t2 = t * t;
    // distance of tr^2 from the elliptic/parabolic segment [0, 4]
    let seg = if t2.re < 0.0 {
        t2.norm()
    } else if t2.re > 4.0 {
        (t2 - 4.0).norm()
    } else {
        t2.im.abs()
    };
    let par_gap = (t2 - 4.0).norm();
    let one = Complex64::new(1.0, 0.0);
    let near_identity = [(m[0] - one).norm() + m[1].norm() + m[2].norm() + (m[3] - one).norm(),
        (m[0] + one).norm() + m[1].norm() + m[2].norm() + (m[3] + one).norm()]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
        < 1e-12;
    let kind = if seg > TOL_CLASSIFY {
        Kind::Hyperbolic
    } else if near_identity {
        Kind::Elliptic
    } else if par_gap > TOL_CLASSIFY {
        if seg == 0.0 || integral {
            Kind::Elliptic
        } else {
            return Err(Error::NumericallyAmbiguous { gap: seg });
        }
    } else if par_gap == 0.0 && integral {
        Kind::Parabolic
    } else {
        return Err(Error::NumericallyAmbiguous { gap: par_gap });
    };
    match kind {
        Kind::Hyperbolic => {
            let disc = (t2 - 4.0).sqrt();
            let rho = ((t + disc) / 2.0).norm().max(((t - disc) / 2.0).norm());
            let tau = 2.0 * rho.ln();
            let (rep, att) = mobius_fixed_points(m);
            let axis = GeodesicLine::new(IdealPoint::from_boundary_complex(rep), IdealPoint::from_boundary_complex(att))?;
            Ok(IsometryClass { kind, tau, fixed_ideal: vec![axis.minus.clone(), axis.plus.clone()], axis: Some(axis) })
        }
        Kind::Parabolic => Ok(IsometryClass {
            kind,
            tau: 0.0,
            axis: None,
            fixed_ideal: vec![IdealPoint::from_boundary_complex(parabolic_fixed_point(m))],
        }),
        Kind::Elliptic => Ok(IsometryClass { kind, tau: 0.0, axis: None, fixed_ideal: vec![] }),
    }
}

/// Null eigenvector for eigenvalue `lambda`, from the smallest singular vector.
fn null_eigenvector(l: &DMatrix<f64>, lambda: f64) -> DVector<f64> {
    let n = l.nrows();
    let svd = (l - DMatrix::<f64>::identity(n, n) * lambda).svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let (imin, _) = svd.singular_values.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    vt.row(imin).transpose()
}

fn lorentz_hyperbolic(l: &DMatrix<f64>) -> Result<IsometryClass> {
    let rho = l.clone().complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let plus = IdealPoint::from_null(null_eigenvector(l, rho));
    let minus = IdealPoint::from_null(null_eigenvector(l, 1.0 / rho));
    let n = l.nrows() - 1;
    // refine: L xi+ = e^tau xi+ on the time coordinate
    let image = l * plus.coords();
    let tau = (image[n] / plus.coords()[n]).ln();
    let axis = GeodesicLine::new(minus, plus)?;
    Ok(IsometryClass { kind: Kind::Hyperbolic, tau, fixed_ideal: vec![axis.minus.clone(), axis.plus.clone()], axis: Some(axis) })
}

fn lorentz_parabolic(l: &DMatrix<f64>) -> Result<IsometryClass> {
    // for a unipotent L the image of (L - I)^2 is the fixed null line
    let n = l.nrows();
    let nm = l - DMatrix::<f64>::identity(n, n);
    let sq = &nm * &nm;
    let (jmax, _) = (0..n).map(|j| (j, sq.column(j).norm())).fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    let xi = IdealPoint::from_null(sq.column(jmax).into_owned());
    Ok(IsometryClass { kind: Kind::Parabolic, tau: 0.0, axis: None, fixed_ideal: vec![xi] })
}

/// Product of the word's letters left to right, `a`, `b` substituted.
pub fn evaluate_word(w: &Word, a: &Isometry, b: &Isometry) -> Result<Isometry> {
    a.check_model(b)?;
    let gens = [a.clone(), b.clone()];
    let invs = [a.inverse(), b.inverse()];
    let mut acc = Isometry::identity(a.model);
    for l in w.letters() {
        let g = if l.exponent() > 0 { &gens[l.generator()] } else { &invs[l.generator()] };
        acc = acc.compose(g)?;
    }
    Ok(acc)
}

/// `h g h^-1`.
pub fn conjugate(g: &Isometry, h: &Isometry) -> Result<Isometry> {
    g.conjugate_by(h)
}

/// JSON form: `{"model": ..., "matrix": [[...]], "exact": [[num, den], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsometryJson {
    pub model: String,
    pub matrix: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<Vec<(Value, Value)>>,
}

fn value_to_bigint(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(f) = n.as_f64().filter(|f| f.fract() == 0.0) {
                ExactMatrix::from_f64(1, &[f]).map(|e| e.entry(0, 0).0).ok_or_else(|| Error::Parse("bad integer".into()))
            } else {
                Err(Error::Parse(format!("exact entry {n} is not an integer")))
            }
        }
        Value::String(s) => s.trim().parse().map_err(|_| Error::Parse(format!("bad integer {s:?}"))),
        other => Err(Error::Parse(format!("bad exact entry {other}"))),
    }
}

fn bigint_to_value(b: &BigInt) -> Value {
    match i64::try_from(b) {
        Ok(i) => Value::from(i),
        Err(_) => Value::from(b.to_string()),
    }
}

fn parse_real_rows(v: &Value) -> Result<Vec<Vec<f64>>> {
    let rows = v.as_array().ok_or_else(|| Error::Parse("matrix must be an array of rows".into()))?;
    rows.iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::Parse("matrix row must be an array".into()))?
                .iter()
                .map(|x| x.as_f64().ok_or_else(|| Error::Parse(format!("bad entry {x}"))))
                .collect()
        })
        .collect()
}

fn parse_complex(x: &Value) -> Result<Complex64> {
    if let Some(f) = x.as_f64() {
        return Ok(Complex64::new(f, 0.0));
    }
    match x.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => Ok(Complex64::new(
            re.as_f64().ok_or_else(|| Error::Parse(format!("bad entry {x}")))?,
            im.as_f64().ok_or_else(|| Error::Parse(format!("bad entry {x}")))?,
        )),
        _ => Err(Error::Parse(format!("complex entry must be [re, im], got {x}"))),
    }
}

impl IsometryJson {
    pub fn to_isometry(&self) -> Result<Isometry> {
        let tag = self.model.trim().to_ascii_lowercase();
        let exact = match &self.exact {
            None => None,
            Some(pairs) => {
                let dim = (pairs.len() as f64).sqrt() as usize;
                let fr = pairs.iter().map(|(n, d)| Ok((value_to_bigint(n)?, value_to_bigint(d)?))).collect::<Result<Vec<_>>>()?;
                Some(ExactMatrix::from_fractions(dim, &fr)?)
            }
        };
        let iso = match tag.as_str() {
            "sl2-real" => {
                let rows = parse_real_rows(&self.matrix)?;
                if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
                    return Err(Error::Parse("sl2-real matrix must be 2x2".into()));
                }
                match exact {
                    Some(e) => {
                        let iso = Isometry::sl2_exact(e)?;
                        let f = iso.real_entries().expect("real");
                        let given = [rows[0][0], rows[0][1], rows[1][0], rows[1][1]];
                        let scale = given.iter().fold(1.0f64, |s, x| s.max(x.abs()));
                        if f.iter().zip(&given).any(|(a, b)| (a - b).abs() > 1e-12 * scale) {
                            return Err(Error::InvalidIsometry("exact entries disagree with matrix".into()));
                        }
                        iso
                    }
                    None => Isometry::sl2_real([rows[0][0], rows[0][1], rows[1][0], rows[1][1]])?,
                }
            }
            "sl2-complex" => {
                if exact.is_some() {
                    return Err(Error::Parse("exact entries are supported for real models only".into()));
                }
                let rows = self.matrix.as_array().ok_or_else(|| Error::Parse("matrix must be an array".into()))?;
                if rows.len() != 2 {
                    return Err(Error::Parse("sl2-complex matrix must be 2x2".into()));
                }
                let mut m = [Complex64::new(0.0, 0.0); 4];
                for (i, r) in rows.iter().enumerate() {
                    let r = r.as_array().filter(|r| r.len() == 2).ok_or_else(|| Error::Parse("row must have 2 entries".into()))?;
                    for (j, x) in r.iter().enumerate() {
                        m[2 * i + j] = parse_complex(x)?;
                    }
                }
                Isometry::sl2_complex(m)?
            }
            t if t.starts_with("hyperboloid") => {
                let rows = parse_real_rows(&self.matrix)?;
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return Err(Error::Parse("hyperboloid matrix must be square".into()));
                }
                if let Some(d) = t.strip_prefix("hyperboloid-").and_then(|d| d.parse::<usize>().ok()) {
                    if d + 1 != n {
                        return Err(Error::Parse(format!("model {t} needs a {}x{} matrix", d + 1, d + 1)));
                    }
                }
                match exact {
                    Some(e) => Isometry::lorentz_exact(e)?,
                    None => Isometry::lorentz(DMatrix::from_fn(n, n, |i, j| rows[i][j]))?,
                }
            }
            other => return Err(Error::Parse(format!("unknown model {other:?}"))),
        };
        Ok(iso)
    }

    pub fn from_isometry(g: &Isometry) -> Self {
        let matrix = match &g.source {
            Source::Real(m) => serde_json::json!([[m[0], m[1]], [m[2], m[3]]]),
            Source::Complex(m) => serde_json::json!([[[m[0].re, m[0].im], [m[1].re, m[1].im]], [[m[2].re, m[2].im], [m[3].re, m[3].im]]]),
            Source::Lorentz(l) => Value::from((0..l.nrows()).map(|i| (0..l.ncols()).map(|j| l[(i, j)]).collect::<Vec<_>>()).collect::<Vec<_>>()),
        };
        let exact = g.exact.as_ref().map(|e| {
            let n = e.dim();
            (0..n * n)
                .map(|k| {
                    let (a, b) = e.entry(k / n, k % n);
                    (bigint_to_value(&a), bigint_to_value(&b))
                })
                .collect()
        });
        Self { model: g.model.tag().to_string(), matrix, exact }
    }
}

impl Serialize for Isometry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IsometryJson::from_isometry(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Isometry {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        IsometryJson::deserialize(d)?.to_isometry().map_err(serde::de::Error::custom)
    }
}

/// `[[cosh(t/2), sinh(t/2)], [sinh(t/2), cosh(t/2)]]`: translation by `t` along
/// the geodesic from -1 to 1 (the unit semicircle).
pub fn sl2_translation_on_unit_circle(t: f64) -> Isometry {
    let (c, s) = ((t / 2.0).cosh(), (t / 2.0).sinh());
    Isometry::sl2_real([c, s, s, c]).expect("determinant one")
}

/// `diag(e^(t/2), e^(-t/2))`: translation by `t` along the imaginary axis.
pub fn sl2_diagonal(t: f64) -> Isometry {
    Isometry::sl2_real([(t / 2.0).exp(), 0.0, 0.0, (-t / 2.0).exp()]).expect("determinant one")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    fn real(m: [f64; 4]) -> Isometry {
        Isometry::sl2_real(m).unwrap()
    }

    #[test]
    fn classify_examples() {
        let g = real([E, 0.0, 0.0, 1.0 / E]);
        let c = g.classify().unwrap();
        assert_eq!(c.kind, Kind::Hyperbolic);
        assert_relative_eq!(c.tau, 2.0, epsilon = 1e-14);
        let axis = c.axis.unwrap();
        assert!(axis.plus.approx_eq(&IdealPoint::new(vec![1.0, 0.0, 1.0]).unwrap(), 1e-14));
        assert!(axis.minus.approx_eq(&IdealPoint::new(vec![-1.0, 0.0, 1.0]).unwrap(), 1e-14));

        let p = real([1.0, 1.0, 0.0, 1.0]).classify().unwrap();
        assert_eq!(p.kind, Kind::Parabolic);
        assert_eq!(p.tau, 0.0);
        assert!(p.fixed_ideal[0].approx_eq(&IdealPoint::from_boundary_real(None), 0.0));

        let th = 0.3f64;
        let r = real([th.cos(), -th.sin(), th.sin(), th.cos()]).classify().unwrap();
        assert_eq!(r.kind, Kind::Elliptic);
        assert_eq!(r.tau, 0.0);
        assert!(r.axis.is_none());
    }

    #[test]
    fn axis_is_translated_by_tau() {
        let g = real([2.0, 1.0, 3.0, 2.0]);
        let c = g.classify().unwrap();
        let axis = c.axis.unwrap();
        for t in [-1.0, 0.0, 2.5] {
            let p = axis.point_at(t);
            let q = g.apply(&p);
            assert!(distance(&q, &axis.point_at(t + c.tau)) < 1e-9);
        }
    }

    #[test]
    fn translation_length_examples() {
        assert_eq!(Isometry::identity(Model::Sl2Real).translation_length().unwrap(), 0.0);
        let g = real([E, 0.0, 0.0, 1.0 / E]);
        assert_relative_eq!(g.translation_length().unwrap(), 2.0, epsilon = 1e-14);
        assert_relative_eq!(g.pow(3).translation_length().unwrap(), 6.0, epsilon = 1e-12);
    }

    #[test]
    fn cubed_translation_length_matches_grid_minimum() {
        // brute-force inf of d(x, g^3 x) over a grid of upper half-plane points
        let g3 = real([E, 0.0, 0.0, 1.0 / E]).pow(3);
        let mut best = f64::INFINITY;
        for i in -40..=40 {
            for j in -40..=40 {
                let x = SpacePoint::from_upper_half_plane(i as f64 * 0.05, (j as f64 * 0.05).exp()).unwrap();
                best = best.min(g3.displacement(&x));
            }
        }
        assert_relative_eq!(best, 6.0, epsilon = 1e-9);
    }

    #[test]
    fn word_evaluation() {
        let a = real([1.0, 2.0, 0.0, 1.0]);
        let b = real([1.0, 0.0, 2.0, 1.0]);
        assert!(evaluate_word(&Word::empty(), &a, &b).unwrap().is_identity(0.0));
        assert!(evaluate_word(&Word::parse("ab").unwrap(), &a, &a.inverse()).unwrap().is_identity(0.0));
        let c = evaluate_word(&Word::parse("abAB").unwrap(), &a, &b).unwrap();
        assert_eq!(c.exact().unwrap(), &ExactMatrix::from_integers(2, &[21, -8, 8, -3]).unwrap());
        let z = Isometry::sl2_complex([Complex64::new(1.0, 0.0); 4].map(|_| Complex64::new(1.0, 0.0)));
        assert!(z.is_err());
        let h3 = Isometry::identity(Model::Sl2Complex);
        assert!(matches!(evaluate_word(&Word::parse("a").unwrap(), &a, &h3), Err(Error::ModelMismatch(_, _))));
    }

    #[test]
    fn conjugation_example() {
        let g = real([E, 0.0, 0.0, 1.0 / E]);
        let h = real([1.0, 1.0, 0.0, 1.0]);
        let c = conjugate(&g, &h).unwrap();
        let m = c.real_entries().unwrap();
        assert_relative_eq!(m[0] + m[3], E + 1.0 / E, epsilon = 1e-14);
        assert_relative_eq!(c.translation_length().unwrap(), 2.0, epsilon = 1e-13);
        assert!(conjugate(&g, &Isometry::identity(Model::Sl2Real)).unwrap().distance_to_identity() > 1.0);
        assert!(conjugate(&Isometry::identity(Model::Sl2Real), &h).unwrap().is_identity(0.0));
    }

    #[test]
    fn near_parabolic_float_is_ambiguous() {
        let g = real([1.0 + 1e-12, 0.3, 0.0, 1.0 / (1.0 + 1e-12)]);
        assert!(matches!(g.classify(), Err(Error::NumericallyAmbiguous { .. })));
    }

    #[test]
    fn lorentz_and_sl2_agree() {
        let g = real([2.0, 1.0, 3.0, 2.0]);
        let l = Isometry::lorentz(g.lorentz_matrix().clone()).unwrap();
        assert!(l.is_exact());
        let a = g.classify().unwrap();
        let b = l.classify().unwrap();
        assert_eq!(a.kind, b.kind);
        assert_relative_eq!(a.tau, b.tau, epsilon = 1e-12);
        assert!(a.axis.unwrap().plus.approx_eq(&b.axis.unwrap().plus, 1e-9));

        let p = Isometry::lorentz(real([1.0, 1.0, 0.0, 1.0]).lorentz_matrix().clone()).unwrap();
        let c = p.classify().unwrap();
        assert_eq!(c.kind, Kind::Parabolic);
        assert!(c.fixed_ideal[0].approx_eq(&IdealPoint::from_boundary_real(None), 1e-12));

        // the same parabolic without exact data, classified through ker(L - I)
        let mut m = real([1.0, 0.5, 0.0, 1.0]).lorentz_matrix().clone();
        m[(0, 0)] += 0.0;
        let f = Isometry::lorentz(m).unwrap();
        assert!(!f.is_exact());
        let c = f.classify().unwrap();
        assert_eq!(c.kind, Kind::Parabolic);
        assert!(c.fixed_ideal[0].approx_eq(&IdealPoint::from_boundary_real(None), 1e-9));

        let th = 0.7f64;
        let r = Isometry::lorentz(real([th.cos(), -th.sin(), th.sin(), th.cos()]).lorentz_matrix().clone()).unwrap();
        assert_eq!(r.classify().unwrap().kind, Kind::Elliptic);
    }

    #[test]
    fn complex_model() {
        let c = Complex64::new;
        let lox = Isometry::sl2_complex([c(2.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 1.0).inv()]).unwrap();
        let k = lox.classify().unwrap();
        assert_eq!(k.kind, Kind::Hyperbolic);
        assert_relative_eq!(k.tau, 2.0 * 5f64.sqrt().ln(), epsilon = 1e-12);
        let o = SpacePoint::origin(3);
        assert_relative_eq!(lox.displacement(&o), k.tau, epsilon = 1e-12);
        let par = Isometry::sl2_complex([c(1.0, 0.0), c(1.0, 1.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(par.classify().unwrap().kind, Kind::Parabolic);
        // H^2 sits inside H^3 as x2 = 0
        let g = real([2.0, 1.0, 3.0, 2.0]);
        let gc = Isometry::sl2_complex(g.complex_entries().unwrap()).unwrap();
        let p = SpacePoint::from_upper_half_plane(0.3, 1.7).unwrap();
        let q = SpacePoint::from_upper_half_space(c(0.3, 0.0), 1.7).unwrap();
        let gp = g.apply(&p);
        let gq = gc.apply(&q);
        assert_relative_eq!(gp.coords()[0], gq.coords()[0], epsilon = 1e-12);
        assert_relative_eq!(gp.coords()[1], gq.coords()[1], epsilon = 1e-12);
        assert!(gq.coords()[2].abs() < 1e-12);
    }

    #[test]
    fn robust_displacement_of_long_words() {
        let a = real([1.0, 2.0, 0.0, 1.0]);
        let b = real([1.0, 0.0, 2.0, 1.0]);
        let x = SpacePoint::from_upper_half_plane(0.3, 1.1).unwrap();
        let w = evaluate_word(&Word::parse("ab").unwrap(), &a, &b).unwrap();
        assert_relative_eq!(w.displacement_robust(&x), w.displacement(&x), max_relative = 1e-12);
        // (ab)^200 overflows f64 but tau((ab)^200) = 200 tau(ab)
        let big = w.pow(200);
        let d = big.displacement_robust(&x);
        let tau = w.translation_length().unwrap();
        assert!(d.is_finite());
        assert!(d >= 200.0 * tau - 1e-9 && d <= 200.0 * tau + 2.0 * w.displacement(&x), "{d}");
        let f = real([2.0, 1.0, 1.0, 1.0]);
        let d1 = f.pow(8).displacement_robust(&x);
        assert_relative_eq!(d1, f.pow(8).displacement(&x), max_relative = 1e-12);
        assert!(f.pow(40).apply(&x).time() > 1e30);
    }

    #[test]
    fn json_round_trip() {
        let a: Isometry = serde_json::from_str(r#"{"model":"sl2-real","matrix":[[1,2],[0,1]]}"#).unwrap();
        assert!(a.is_exact());
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"model":"sl2-real","matrix":[[1.0,2.0],[0.0,1.0]],"exact":[[1,1],[2,1],[0,1],[1,1]]}"#);
        let h: Isometry = serde_json::from_str(r#"{"model":"sl2-real","matrix":[[0.5,0],[0,2]],"exact":[[1,2],[0,1],[0,1],[2,1]]}"#).unwrap();
        assert!(h.is_exact());
        let bad = serde_json::from_str::<Isometry>(r#"{"model":"sl2-real","matrix":[[2,0],[0,2]]}"#);
        assert!(bad.is_err());
        let l: Isometry = serde_json::from_str(r#"{"model":"hyperboloid-2","matrix":[[1,0,0],[0,1,0],[0,0,1]]}"#).unwrap();
        assert_eq!(l.model(), Model::Hyperboloid(2));
        let z: Isometry = serde_json::from_str(r#"{"model":"sl2-complex","matrix":[[[1,0],[0,1]],[[0,0],[1,0]]]}"#).unwrap();
        assert_eq!(z.classify().unwrap().kind, Kind::Parabolic);
    }
}
