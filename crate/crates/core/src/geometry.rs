//! Hyperboloid-model geometry of real hyperbolic space.
//!
//! Points of `H^n` are vectors `x` in `R^{n,1}` with `<x,x> = -1` and positive
//! last (time) coordinate, where `<x,y> = x_0 y_0 + ... + x_{n-1} y_{n-1} - x_n y_n`.
//! Ideal points are future null directions scaled so the time coordinate is 1.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative tolerance on point invariants and distance comparisons.
pub const TOL_POINT: f64 = 1e-9;
/// Tolerance on angle comparisons.
pub const TOL_ANGLE: f64 = 1e-8;

/// Minkowski bilinear form with the time coordinate last.
pub fn minkowski(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let n = x.len() - 1;
    let mut s = -x[n] * y[n];
    for i in 0..n {
        s += x[i] * y[i];
    }
    s
}

fn check_finite(v: &DVector<f64>) -> Result<()> {
    if v.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidPoint("non-finite coordinate".into()))
    }
}

/// A point of `H^n` in hyperboloid coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacePoint {
    coords: DVector<f64>,
}

impl SpacePoint {
    /// Validates the hyperboloid invariant and re-normalizes onto the sheet.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let v = DVector::from_vec(coords);
        if v.len() < 3 {
            return Err(Error::InvalidPoint("need at least 3 coordinates".into()));
        }
        check_finite(&v)?;
        let q = minkowski(&v, &v);
        let scale = v[v.len() - 1] * v[v.len() - 1];
        if (q + 1.0).abs() > TOL_POINT * scale.max(1.0) {
            return Err(Error::InvalidPoint(format!("<x,x> = {q}")));
        }
        Self::renormalize(v)
    }

    /// Projects a time-like future vector onto the hyperboloid.
    ///
    /// Used after every isometry application to absorb rounding drift.
    pub fn renormalize(v: DVector<f64>) -> Result<Self> {
        check_finite(&v)?;
        let n = v.len() - 1;
        let q = minkowski(&v, &v);
        if v[n] <= 0.0 {
            return Err(Error::InvalidPoint(format!("vector is not future time-like (time = {})", v[n])));
        }
        if -q > 1e-13 * v[n] * v[n] {
            return Ok(Self { coords: v / (-q).sqrt() });
        }
        // far from the origin the form cancels to noise: keep the spatial part of
        // the (unit-scale) image and recompute the time coordinate
        let spatial = v.rows(0, n).norm_squared();
        if q.abs() <= 1e-6 * v[n] * v[n] && spatial > 0.0 {
            let mut w = v;
            w[n] = (1.0 + spatial).sqrt();
            return Ok(Self { coords: w });
        }
        Err(Error::InvalidPoint(format!("vector is not future time-like (<x,x> = {q}, time = {})", v[n])))
    }

    /// The base point `(0, ..., 0, 1)` of `H^dim`.
    pub fn origin(dim: usize) -> Self {
        let mut v = DVector::zeros(dim + 1);
        v[dim] = 1.0;
        Self { coords: v }
    }

    /// Upper half-plane point `u + iv`, via `z -> (1/v)[[u^2+v^2, u],[u, 1]]`.
    pub fn from_upper_half_plane(u: f64, v: f64) -> Result<Self> {
        if !(v > 0.0) {
            return Err(Error::InvalidPoint(format!("height {v} must be positive")));
        }
        let a = (u * u + v * v) / v;
        let d = 1.0 / v;
        Self::renormalize(DVector::from_vec(vec![(a - d) / 2.0, u / v, (a + d) / 2.0]))
    }

    /// Upper half-space point `(w, h)` in `H^3`.
    pub fn from_upper_half_space(w: Complex64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidPoint(format!("height {h} must be positive")));
        }
        let a = (w.norm_sqr() + h * h) / h;
        let d = 1.0 / h;
        Self::renormalize(DVector::from_vec(vec![
            (a - d) / 2.0,
            w.re / h,
            w.im / h,
            (a + d) / 2.0,
        ]))
    }

    /// Inverse of [`SpacePoint::from_upper_half_plane`] (first spatial pair only).
    pub fn to_upper_half_plane(&self) -> (f64, f64) {
        let n = self.dim();
        let (x0, x1, t) = (self.coords[0], self.coords[1], self.coords[n]);
        // P11 = t + x0 = (u^2+v^2)/v, P22 = t - x0 = 1/v, P12 = x1 = u/v
        let v = 1.0 / (t - x0);
        (x1 * v, v)
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.coords.iter().copied().collect()
    }

    /// Dimension `n` of the ambient `H^n`.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn time(&self) -> f64 {
        self.coords[self.dim()]
    }

    /// Point at distance `t` from `self` in the unit tangent direction `dir`.
    pub fn exp(&self, dir: &DVector<f64>, t: f64) -> Result<SpacePoint> {
        let u = unit_tangent(self, dir)?;
        Self::renormalize(&self.coords * t.cosh() + u * t.sinh())
    }

    /// Point at distance `t` from `self` along the geodesic towards `other`.
    pub fn toward(&self, other: &SpacePoint, t: f64) -> Result<SpacePoint> {
        let d = distance(self, other);
        if d < TOL_POINT {
            return Ok(self.clone());
        }
        let u = (&other.coords - &self.coords * d.cosh()) / d.sinh();
        Self::renormalize(&self.coords * t.cosh() + u * t.sinh())
    }

    /// Point dividing the segment `self other` at fraction `s` in `[0,1]`.
    pub fn lerp(&self, other: &SpacePoint, s: f64) -> Result<SpacePoint> {
        self.toward(other, s * distance(self, other))
    }
}

impl Serialize for SpacePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpacePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        SpacePoint::new(v).map_err(serde::de::Error::custom)
    }
}

/// Projects `dir` to the tangent space at `p` and normalizes it.
pub fn unit_tangent(p: &SpacePoint, dir: &DVector<f64>) -> Result<DVector<f64>> {
    let u = dir + p.coords() * minkowski(dir, p.coords());
    let nrm = minkowski(&u, &u);
    if !(nrm > 1e-24) {
        return Err(Error::InvalidPoint("tangent direction vanishes".into()));
    }
    Ok(u / nrm.sqrt())
}

/// A point of the visual boundary, stored as a null vector with time 1.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealPoint {
    coords: DVector<f64>,
}

impl IdealPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let v = DVector::from_vec(coords);
        if v.len() < 3 {
            return Err(Error::InvalidPoint("need at least 3 coordinates".into()));
        }
        check_finite(&v)?;
        let t = v[v.len() - 1];
        let q = minkowski(&v, &v);
        if t <= 0.0 || q.abs() > 1e-7 * t * t {
            return Err(Error::InvalidPoint(format!("not a future null vector (<x,x> = {q})")));
        }
        Ok(Self::from_null(v))
    }

    /// Normalizes a null vector (either sign) so the time coordinate is 1; the spatial
    /// part is rescaled to unit Euclidean length to remove drift.
    pub fn from_null(v: DVector<f64>) -> Self {
        let n = v.len() - 1;
        let v = if v[n] < 0.0 { -v } else { v };
        let spatial = v.rows(0, n).norm();
        let mut c = DVector::zeros(n + 1);
        for i in 0..n {
            c[i] = v[i] / spatial;
        }
        c[n] = 1.0;
        Self { coords: c }
    }

    /// Boundary point of the upper half-plane; `None` is the point at infinity.
    pub fn from_boundary_real(u: Option<f64>) -> Self {
        match u {
            None => Self { coords: DVector::from_vec(vec![1.0, 0.0, 1.0]) },
            Some(u) => {
                let s = u * u + 1.0;
                Self { coords: DVector::from_vec(vec![(u * u - 1.0) / s, 2.0 * u / s, 1.0]) }
            }
        }
    }

    /// Boundary point of the upper half-space model of `H^3`.
    pub fn from_boundary_complex(w: Option<Complex64>) -> Self {
        match w {
            None => Self { coords: DVector::from_vec(vec![1.0, 0.0, 0.0, 1.0]) },
            Some(w) => {
                let m = w.norm_sqr();
                let s = m + 1.0;
                Self {
                    coords: DVector::from_vec(vec![(m - 1.0) / s, 2.0 * w.re / s, 2.0 * w.im / s, 1.0]),
                }
            }
        }
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.coords.iter().copied().collect()
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Euclidean distance between the normalized representatives (chordal metric).
    pub fn chordal(&self, other: &IdealPoint) -> f64 {
        (&self.coords - &other.coords).norm()
    }

    /// `<self, other>`, evaluated as `-|self - other|^2 / 2` so nearby points keep
    /// their relative precision (both representatives are null with time 1).
    pub fn inner(&self, other: &IdealPoint) -> f64 {
        -0.5 * (&self.coords - &other.coords).norm_squared()
    }

    pub fn approx_eq(&self, other: &IdealPoint, tol: f64) -> bool {
        self.chordal(other) <= tol
    }
}

impl Serialize for IdealPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for IdealPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        IdealPoint::new(v).map_err(serde::de::Error::custom)
    }
}

/// A complete oriented geodesic, from `minus` to `plus`.
///
/// Unit-speed parametrization: `point_at(t) = (e^t plus + e^-t minus) / sqrt(-2<plus,minus>)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicLine {
    pub minus: IdealPoint,
    pub plus: IdealPoint,
}

impl GeodesicLine {
    pub fn new(minus: IdealPoint, plus: IdealPoint) -> Result<Self> {
        if minus.dim() != plus.dim() || minus.chordal(&plus) < 1e-12 {
            return Err(Error::DegenerateLine);
        }
        Ok(Self { minus, plus })
    }

    /// The line through two distinct points, oriented from `x` to `y`.
    pub fn through(x: &SpacePoint, y: &SpacePoint) -> Result<Self> {
        let d = distance(x, y);
        if d < TOL_POINT {
            return Err(Error::DegenerateLine);
        }
        let u = (y.coords() - x.coords() * d.cosh()) / d.sinh();
        Self::new(
            IdealPoint::from_null(x.coords() - &u),
            IdealPoint::from_null(x.coords() + &u),
        )
    }

    /// `sqrt(-2 <plus, minus>)`, the chordal distance of the endpoints.
    pub fn norm_factor(&self) -> f64 {
        self.plus.chordal(&self.minus)
    }

    pub fn point_at(&self, t: f64) -> SpacePoint {
        let v = (self.plus.coords() * t.exp() + self.minus.coords() * (-t).exp()) / self.norm_factor();
        SpacePoint::renormalize(v).expect("geodesic points are time-like")
    }

    /// Parameter of the nearest point to `x` (or of the footpoint of an ideal point).
    fn foot_parameter(&self, v: &DVector<f64>) -> f64 {
        let a = -minkowski(v, self.plus.coords());
        let b = -minkowski(v, self.minus.coords());
        0.5 * (b / a).ln()
    }

    fn ideal_foot_parameter(&self, xi: &IdealPoint) -> f64 {
        0.5 * (xi.inner(&self.minus) / xi.inner(&self.plus)).ln()
    }

    /// Arc-length parameter of the projection of `x` onto the line.
    pub fn parameter_of(&self, x: &SpacePoint) -> f64 {
        self.foot_parameter(x.coords())
    }

    pub fn contains_ideal(&self, xi: &IdealPoint, tol: f64) -> bool {
        self.plus.approx_eq(xi, tol) || self.minus.approx_eq(xi, tol)
    }

    /// Unit tangent vector at `point_at(t)` pointing towards `plus`.
    pub fn tangent_at(&self, t: f64) -> DVector<f64> {
        let v = (self.plus.coords() * t.exp() - self.minus.coords() * (-t).exp()) / self.norm_factor();
        let n = minkowski(&v, &v).sqrt();
        v / n
    }

    pub fn dim(&self) -> usize {
        self.plus.dim()
    }
}

impl Serialize for GeodesicLine {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (&self.minus, &self.plus).serialize(s)
    }
}

impl<'de> Deserialize<'de> for GeodesicLine {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (minus, plus) = <(IdealPoint, IdealPoint)>::deserialize(d)?;
        GeodesicLine::new(minus, plus).map_err(serde::de::Error::custom)
    }
}

/// Point or ideal point, the two inputs accepted by [`project_to_line`].
#[derive(Debug, Clone)]
pub enum Target<'a> {
    Point(&'a SpacePoint),
    Ideal(&'a IdealPoint),
}

/// A closed half-space `H(p,q) = {x : d(x,p) <= d(x,q)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub nearer: SpacePoint,
    pub farther: SpacePoint,
}

impl HalfSpace {
    pub fn new(nearer: SpacePoint, farther: SpacePoint) -> Result<Self> {
        if distance(&nearer, &farther) < TOL_POINT {
            return Err(Error::DegenerateHalfSpace);
        }
        Ok(Self { nearer, farther })
    }

    /// Closed membership: `d(x,p) <= d(x,q)` up to the point tolerance.
    pub fn contains(&self, x: &SpacePoint) -> bool {
        let dp = distance(x, &self.nearer);
        let dq = distance(x, &self.farther);
        dp <= dq + TOL_POINT * dq.max(1.0)
    }

    /// Space-like normal `p - q`; the half-space is `{<x, n> >= 0}`.
    pub fn normal(&self) -> DVector<f64> {
        self.nearer.coords() - self.farther.coords()
    }

    /// Signed distance to the bisector, positive inside the half-space.
    pub fn signed_distance(&self, x: &SpacePoint) -> f64 {
        let n = self.normal();
        let nn = minkowski(&n, &n).sqrt();
        (minkowski(x.coords(), &n) / nn).asinh()
    }

    /// Midpoint of `pq`, which lies on the bisector.
    pub fn bisector_center(&self) -> SpacePoint {
        SpacePoint::renormalize(self.nearer.coords() + self.farther.coords())
            .expect("sum of future time-like vectors is future time-like")
    }

    /// Point of the bisector reached from its center along tangent `dir`
    /// (projected into the bisector) at distance `t`.
    pub fn bisector_point(&self, dir: &DVector<f64>, t: f64) -> Result<SpacePoint> {
        let m = self.bisector_center();
        let n = self.normal();
        let nn = minkowski(&n, &n);
        let w = dir - &n * (minkowski(dir, &n) / nn);
        m.exp(&w, t)
    }
}

/// Hyperbolic distance, evaluated as `2 asinh(|x - y|_M / 2)` for accuracy at
/// short range (equal to `arccosh(-<x,y>)`).
pub fn distance(x: &SpacePoint, y: &SpacePoint) -> f64 {
    let d = x.coords() - y.coords();
    let q = minkowski(&d, &d).max(0.0);
    2.0 * (q.sqrt() / 2.0).asinh()
}

/// Riemannian angle at `vertex` between the segments to `a` and `b`.
pub fn angle(vertex: &SpacePoint, a: &SpacePoint, b: &SpacePoint) -> Result<f64> {
    if distance(vertex, a) < TOL_POINT || distance(vertex, b) < TOL_POINT {
        return Err(Error::DegenerateAngle);
    }
    let v = vertex.coords();
    let ua = a.coords() + v * minkowski(a.coords(), v);
    let ub = b.coords() + v * minkowski(b.coords(), v);
    let aa = minkowski(&ua, &ua);
    let bb = minkowski(&ub, &ub);
    let ab = minkowski(&ua, &ub);
    let sin = (aa * bb - ab * ab).max(0.0).sqrt();
    Ok(sin.atan2(ab))
}

/// Nearest-point projection of a point, or footpoint of an ideal point, onto `line`.
pub fn project_to_line(x: Target<'_>, line: &GeodesicLine) -> Result<SpacePoint> {
    match x {
        Target::Point(p) => Ok(line.point_at(line.parameter_of(p))),
        Target::Ideal(xi) => {
            if line.contains_ideal(xi, 1e-12) {
                return Err(Error::ProjectionUndefined);
            }
            Ok(line.point_at(line.ideal_foot_parameter(xi)))
        }
    }
}

/// Distance from a point to a line.
pub fn distance_to_line(x: &SpacePoint, line: &GeodesicLine) -> f64 {
    distance(x, &line.point_at(line.parameter_of(x)))
}

/// Closest pair of points on two lines: returns `(distance, s, t)` with
/// `s`, `t` the arc-length parameters of the feet on `l1`, `l2`.
///
/// In the variables `u = s + t`, `v = s - t` the objective `-<l1(s), l2(t)>`
/// separates into two one-dimensional convex problems with closed-form minima.
pub fn line_distance(l1: &GeodesicLine, l2: &GeodesicLine) -> Result<(f64, f64, f64)> {
    let (p1, m1, p2, m2) = (&l1.plus, &l1.minus, &l2.plus, &l2.minus);
    let a = -p1.inner(p2);
    let b = -p1.inner(m2);
    let c = -m1.inner(p2);
    let d = -m1.inner(m2);
    let tiny = 1e-14;
    if a < tiny || b < tiny || c < tiny || d < tiny {
        return Err(Error::SharedEndpoint);
    }
    let u = 0.5 * (d / a).ln();
    let v = 0.5 * (c / b).ln();
    let s = 0.5 * (u + v);
    let t = 0.5 * (u - v);
    // cosh of the distance is the minimum of -<l1(s), l2(t)>, attained in both variables
    let ch = 2.0 * ((a * d).sqrt() + (b * c).sqrt()) / (l1.norm_factor() * l2.norm_factor());
    let dist = if ch < 1e3 {
        distance(&l1.point_at(s), &l2.point_at(t))
    } else {
        ch.ln() + (1.0 + (1.0 - ch.powi(-2)).sqrt()).ln()
    };
    Ok((dist, s, t))
}

/// Lorentzian cross product of two vectors in `R^{2,1}`: the vector `n` with
/// `<n, w> = det(x, y, w)` for all `w`.
pub fn lorentz_cross(x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
    let e = [
        x[1] * y[2] - x[2] * y[1],
        x[2] * y[0] - x[0] * y[2],
        x[0] * y[1] - x[1] * y[0],
    ];
    DVector::from_vec(vec![e[0], e[1], -e[2]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(v: &[f64]) -> SpacePoint {
        SpacePoint::new(v.to_vec()).unwrap()
    }

    fn x_axis() -> GeodesicLine {
        GeodesicLine::new(
            IdealPoint::new(vec![-1.0, 0.0, 1.0]).unwrap(),
            IdealPoint::new(vec![1.0, 0.0, 1.0]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn distance_examples() {
        let o = SpacePoint::origin(2);
        let s1 = 1f64.sinh();
        let c1 = 1f64.cosh();
        assert_eq!(distance(&o, &o), 0.0);
        assert_relative_eq!(distance(&o, &p(&[0.0, s1, c1])), 1.0, epsilon = 1e-14);
        // arccosh(cosh^2 1), evaluated at 40 digits
        assert_relative_eq!(
            distance(&p(&[s1, 0.0, c1]), &p(&[0.0, s1, c1])),
            1.513374006596503959804,
            epsilon = 1e-14
        );
    }

    #[test]
    fn invalid_point_rejected() {
        assert!(matches!(SpacePoint::new(vec![0.0, 0.0, 2.0]), Err(Error::InvalidPoint(_))));
        assert!(matches!(SpacePoint::new(vec![0.0, 0.0, -1.0]), Err(Error::InvalidPoint(_))));
        assert!(SpacePoint::new(vec![f64::NAN, 0.0, 1.0]).is_err());
    }

    #[test]
    fn angle_examples() {
        let o = SpacePoint::origin(2);
        let s1 = 1f64.sinh();
        let c1 = 1f64.cosh();
        let a = p(&[s1, 0.0, c1]);
        let b = p(&[0.0, s1, c1]);
        let a2 = p(&[-s1, 0.0, c1]);
        assert_relative_eq!(angle(&o, &a, &b).unwrap(), std::f64::consts::FRAC_PI_2, epsilon = 1e-14);
        assert_eq!(angle(&o, &a, &a).unwrap(), 0.0);
        assert_relative_eq!(angle(&o, &a, &a2).unwrap(), std::f64::consts::PI, epsilon = 1e-14);
        assert_eq!(angle(&o, &o, &a), Err(Error::DegenerateAngle));
    }

    #[test]
    fn projection_examples() {
        let l = x_axis();
        let q = l.point_at(0.7);
        assert_relative_eq!(distance(&project_to_line(Target::Point(&q), &l).unwrap(), &q), 0.0, epsilon = 1e-12);
        let y = p(&[0.0, 1f64.sinh(), 1f64.cosh()]);
        let f = project_to_line(Target::Point(&y), &l).unwrap();
        assert!(distance(&f, &SpacePoint::origin(2)) < 1e-12);
        let xi = IdealPoint::new(vec![0.0, 1.0, 1.0]).unwrap();
        let f = project_to_line(Target::Ideal(&xi), &l).unwrap();
        assert!(distance(&f, &SpacePoint::origin(2)) < 1e-12);
        assert_eq!(project_to_line(Target::Ideal(&l.plus), &l), Err(Error::ProjectionUndefined));
    }

    #[test]
    fn ideal_footpoint_minimizes_busemann() {
        // Busemann function of xi along the line is log(-<xi, x(t)>); minimize by golden section.
        let l = x_axis();
        let xi = IdealPoint::from_boundary_real(Some(0.3));
        let f = |t: f64| (-minkowski(xi.coords(), l.point_at(t).coords())).ln();
        let (mut lo, mut hi) = (-10.0f64, 10.0f64);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let m1 = hi - g * (hi - lo);
            let m2 = lo + g * (hi - lo);
            if f(m1) < f(m2) {
                hi = m2
            } else {
                lo = m1
            }
        }
        let foot = project_to_line(Target::Ideal(&xi), &l).unwrap();
        assert!(distance(&foot, &l.point_at(0.5 * (lo + hi))) < 1e-7);
    }

    #[test]
    fn half_space_examples() {
        let a = p(&[1f64.sinh(), 0.0, 1f64.cosh()]);
        let b = p(&[-1f64.sinh(), 0.0, 1f64.cosh()]);
        let h = HalfSpace::new(a.clone(), b.clone()).unwrap();
        assert!(h.contains(&a));
        assert!(!h.contains(&b));
        assert!(h.contains(&SpacePoint::origin(2)));
        assert!(HalfSpace::new(a.clone(), a).is_err());
    }

    #[test]
    fn line_distance_matches_lorentz_cross_product() {
        let l1 = x_axis();
        let l2 = GeodesicLine::new(IdealPoint::from_boundary_real(Some(3.0)), IdealPoint::from_boundary_real(Some(5.0))).unwrap();
        let (d, s, t) = line_distance(&l1, &l2).unwrap();
        let n1 = lorentz_cross(l1.minus.coords(), l1.plus.coords());
        let n2 = lorentz_cross(l2.minus.coords(), l2.plus.coords());
        let c = minkowski(&n1, &n2).abs() / (minkowski(&n1, &n1) * minkowski(&n2, &n2)).sqrt();
        assert_relative_eq!(d, c.acosh(), epsilon = 1e-10);
        // the common perpendicular meets both lines at right angles
        let f1 = l1.point_at(s);
        let f2 = l2.point_at(t);
        let a1 = angle(&f1, &f2, &l1.point_at(s + 1.0)).unwrap();
        let a2 = angle(&f2, &f1, &l2.point_at(t + 1.0)).unwrap();
        assert_relative_eq!(a1, std::f64::consts::FRAC_PI_2, epsilon = 1e-8);
        assert_relative_eq!(a2, std::f64::consts::FRAC_PI_2, epsilon = 1e-8);
    }

    #[test]
    fn crossing_lines_have_zero_distance() {
        let l1 = x_axis();
        let l2 = GeodesicLine::new(IdealPoint::new(vec![0.0, -1.0, 1.0]).unwrap(), IdealPoint::new(vec![0.0, 1.0, 1.0]).unwrap()).unwrap();
        let (d, s, t) = line_distance(&l1, &l2).unwrap();
        assert!(d < 1e-12 && s.abs() < 1e-12 && t.abs() < 1e-12);
        assert_eq!(line_distance(&l1, &GeodesicLine::new(l1.plus.clone(), IdealPoint::from_boundary_real(Some(2.0))).unwrap()), Err(Error::SharedEndpoint));
    }

    #[test]
    fn upper_half_plane_round_trip() {
        let q = SpacePoint::from_upper_half_plane(0.4, 2.5).unwrap();
        let (u, v) = q.to_upper_half_plane();
        assert_relative_eq!(u, 0.4, epsilon = 1e-12);
        assert_relative_eq!(v, 2.5, epsilon = 1e-12);
        assert_eq!(SpacePoint::from_upper_half_plane(0.0, 1.0).unwrap(), SpacePoint::origin(2));
    }

    #[test]
    fn json_round_trip() {
        let q = SpacePoint::from_upper_half_plane(0.4, 2.5).unwrap();
        let s = serde_json::to_string(&q).unwrap();
        let back: SpacePoint = serde_json::from_str(&s).unwrap();
        assert!(distance(&q, &back) < 1e-12);
        let l = x_axis();
        let s = serde_json::to_string(&l).unwrap();
        assert_eq!(s, "[[-1.0,0.0,1.0],[1.0,0.0,1.0]]");
    }
}
