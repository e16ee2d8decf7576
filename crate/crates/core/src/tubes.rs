//! Margulis tubes `T_eps(g) = {x : d(x, g x) <= eps}` and their unions over powers.
//!
//! For a hyperbolic `g` with translation length `tau` and rotational part `R` on
//! the normal bundle of the axis, a point at distance `r` from the axis in unit
//! normal direction `u` is displaced by
//!
//! ```text
//! cosh d = cosh(tau) cosh^2 r - sinh^2 r <u, R u>
//! ```
//!
//! so `T_eps(g^i)` lies between the round tubes whose radii solve this with
//! `<u, R^i u>` replaced by its extreme values. Pure parabolics have horoballs
//! as tubes: `cosh d(x, g x) - 1 = k <x, xi>^2`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::constants::{m_exponent, r_margulis, PaperConstants};
use crate::error::{Error, Result};
use crate::geometry::{distance, line_distance, minkowski, project_to_line, GeodesicLine, IdealPoint, SpacePoint, Target, TOL_POINT};
use crate::isometry::{Isometry, Kind};

/// Early-exit cap for parabolic unions.
pub const I_MAX: u64 = 1000;
/// Largest `m_g` for which per-power radii are enumerated.
const MAX_PROFILE_POWERS: u64 = 1 << 22;
/// Entries of the radius profile kept for reporting.
const PROFILE_REPORT: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TubeKind {
    HyperbolicTube,
    ParabolicCusp,
}

/// Geometric core of `script-T_eps(g)`: a round tube containing it, or its horoball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Core {
    /// Points within `radius` of the axis.
    Axis { axis: GeodesicLine, radius: f64 },
    /// `{x : -<x, center> <= level}` with `center` normalized to time 1.
    Horoball { center: IdealPoint, level: f64 },
}

impl Core {
    /// Image under an isometry: `h T_eps(g) = T_eps(h g h^-1)`.
    pub fn transformed(&self, h: &Isometry) -> Core {
        match self {
            Core::Axis { axis, radius } => Core::Axis { axis: h.apply_line(axis), radius: *radius },
            Core::Horoball { center, level } => {
                let v = h.lorentz_matrix() * center.coords();
                let scale = v[v.len() - 1].abs();
                Core::Horoball { center: IdealPoint::from_null(v), level: level / scale }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TubeDescriptor {
    pub generator: Isometry,
    pub eps: f64,
    pub kind: TubeKind,
    pub tau: f64,
    /// Largest power with `m tau <= eps/10`; 0 when the union is empty.
    pub m_g: Option<u64>,
    pub axis: Option<GeodesicLine>,
    pub fixed_ideal: Vec<IdealPoint>,
    /// Outer radius of `T_eps(g^i)` for the first powers `i = 1, 2, ...`.
    pub radius_profile: Vec<f64>,
    /// True when every `T_eps(g^i)` is exactly a round tube (no rotational part).
    pub round: bool,
    pub core: Option<Core>,
    #[serde(skip)]
    rotation: Option<DMatrix<f64>>,
}

/// Minkowski-orthonormal basis of the space-like complement of `span(xi+, xi-)`.
pub fn normal_basis(axis: &GeodesicLine) -> Vec<DVector<f64>> {
    let p = axis.plus.coords();
    let m = axis.minus.coords();
    let pm = axis.plus.inner(&axis.minus);
    let dim = p.len();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for k in 0..dim {
        let mut v = DVector::zeros(dim);
        v[k] = 1.0;
        // remove the components along the two null directions
        v = &v - p * (minkowski(&v, m) / pm) - m * (minkowski(&v, p) / pm);
        for b in &basis {
            v = &v - b * minkowski(&v, b);
        }
        let nn = minkowski(&v, &v);
        if nn > 1e-8 {
            basis.push(v / nn.sqrt());
        }
        if basis.len() + 2 == dim {
            break;
        }
    }
    basis
}

/// Matrix of `g` restricted to the normal space of its axis.
fn rotation_part(g: &Isometry, axis: &GeodesicLine) -> DMatrix<f64> {
    let basis = normal_basis(axis);
    let l = g.lorentz_matrix();
    let k = basis.len();
    DMatrix::from_fn(k, k, |a, b| minkowski(&basis[a], &(l * &basis[b])))
}

/// Extreme values of `<u, M u>` over unit `u`.
fn extreme_cos(m: &DMatrix<f64>) -> (f64, f64) {
    if m.nrows() == 1 {
        return (m[(0, 0)], m[(0, 0)]);
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let lo = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo.max(-1.0), hi.min(1.0))
}

/// Radius `r` where the displacement `cosh(i tau) cosh^2 r - c sinh^2 r` reaches `cosh eps`,
/// via `cosh^2 r = (cosh eps - c) / (cosh(i tau) - c)`. `None` when the tube is empty.
fn radius_for(itau: f64, eps: f64, one_minus_c: f64) -> Option<f64> {
    if itau > eps {
        return None;
    }
    let num = 2.0 * (eps / 2.0).sinh().powi(2) + one_minus_c;
    let den = 2.0 * (itau / 2.0).sinh().powi(2) + one_minus_c;
    Some((num / den).sqrt().max(1.0).acosh())
}

/// Closed-form radius of `T_eps(g)` in `H^2`: `arccosh(sinh(eps/2) / sinh(tau/2))`.
pub fn tube_radius_h2(tau: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::NonpositiveEps(eps));
    }
    if !(tau > 0.0) {
        return Err(Error::WrongKind { expected: "hyperbolic", found: format!("tau = {tau}") });
    }
    if (eps / 2.0).sinh() < (tau / 2.0).sinh() {
        return Err(Error::TauExceedsEps { tau, eps });
    }
    Ok(((eps / 2.0).sinh() / (tau / 2.0).sinh()).acosh())
}

impl TubeDescriptor {
    pub fn new(g: &Isometry, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::NonpositiveEps(eps));
        }
        let class = g.classify()?;
        match class.kind {
            Kind::Elliptic => Err(Error::WrongKind { expected: "hyperbolic or parabolic", found: "elliptic".into() }),
            Kind::Hyperbolic => Self::hyperbolic(g, eps, class.tau, class.axis.expect("hyperbolic has an axis")),
            Kind::Parabolic => Self::parabolic(g, eps, class.fixed_ideal[0].clone()),
        }
    }

    fn hyperbolic(g: &Isometry, eps: f64, tau: f64, axis: GeodesicLine) -> Result<Self> {
        let rot = rotation_part(g, &axis);
        let m_g = if tau <= eps / 10.0 { m_exponent(tau, eps)? } else { 0 };
        let orientation_preserving_plane = rot.nrows() == 1 && rot[(0, 0)] > 0.0;
        let round = orientation_preserving_plane || (&rot - DMatrix::identity(rot.nrows(), rot.ncols())).amax() < 1e-12;
        let mut profile = Vec::new();
        let mut outer: Option<f64> = None;
        if m_g > 0 {
            if round {
                // R_i decreases in i, so the union is the first tube
                for i in 1..=m_g.min(PROFILE_REPORT as u64) {
                    profile.push(radius_for(i as f64 * tau, eps, 0.0).expect("i tau <= eps"));
                }
                outer = Some(profile[0]);
            } else {
                if m_g > MAX_PROFILE_POWERS {
                    return Err(Error::Unsupported(format!("rotational tube with m_g = {m_g} powers")));
                }
                let mut power = rot.clone();
                let mut best = 0.0f64;
                for i in 1..=m_g {
                    let (_, hi) = extreme_cos(&power);
                    let r = radius_for(i as f64 * tau, eps, 1.0 - hi).expect("i tau <= eps");
                    if profile.len() < PROFILE_REPORT {
                        profile.push(r);
                    }
                    best = best.max(r);
                    power = &power * &rot;
                }
                outer = Some(best);
            }
        }
        let core = outer.map(|radius| Core::Axis { axis: axis.clone(), radius });
        Ok(Self {
            generator: g.clone(),
            eps,
            kind: TubeKind::HyperbolicTube,
            tau,
            m_g: Some(m_g),
            fixed_ideal: vec![axis.minus.clone(), axis.plus.clone()],
            axis: Some(axis),
            radius_profile: profile,
            round,
            core,
            rotation: Some(rot),
        })
    }

    fn parabolic(g: &Isometry, eps: f64, xi: IdealPoint) -> Result<Self> {
        let l = g.lorentz_matrix();
        let n = l.nrows();
        let nm = l - DMatrix::<f64>::identity(n, n);
        let cube = &nm * &nm * &nm;
        if cube.amax() > 1e-8 * nm.amax().max(1.0).powi(3) {
            return Err(Error::Unsupported("parabolic with a rotational part".into()));
        }
        // k = (cosh d(o, g o) - 1) / <o, xi>^2 and <o, xi> = -1
        let o = SpacePoint::origin(n - 1);
        let d0 = g.displacement(&o);
        let half = if d0 > 1.0 { ((l[(n - 1, n - 1)] - 1.0) / 2.0).sqrt() } else { (d0 / 2.0).sinh() };
        let level = (eps / 2.0).sinh() / half;
        Ok(Self {
            generator: g.clone(),
            eps,
            kind: TubeKind::ParabolicCusp,
            tau: 0.0,
            m_g: None,
            axis: None,
            fixed_ideal: vec![xi.clone()],
            radius_profile: vec![],
            round: true,
            core: Some(Core::Horoball { center: xi, level }),
            rotation: None,
        })
    }

    /// Descriptor of `T_eps(h g h^-1) = h T_eps(g)`, transported rather than recomputed.
    pub fn conjugated(&self, h: &Isometry) -> Result<TubeDescriptor> {
        Ok(TubeDescriptor {
            generator: self.generator.conjugate_by(h)?,
            axis: self.axis.as_ref().map(|a| h.apply_line(a)),
            fixed_ideal: self.fixed_ideal.iter().map(|x| h.apply_ideal(x)).collect(),
            core: self.core.as_ref().map(|c| c.transformed(h)),
            ..self.clone()
        })
    }

    /// Outer radius bound of `T_eps(g^power)` (hyperbolic only).
    pub fn power_radius(&self, power: u64) -> Option<f64> {
        let rot = self.rotation.as_ref()?;
        let c = if self.round {
            1.0
        } else {
            let mut p = rot.clone();
            for _ in 1..power {
                p = &p * rot;
            }
            extreme_cos(&p).1
        };
        radius_for(power as f64 * self.tau, self.eps, 1.0 - c)
    }

    /// Membership in `T_eps(g^power)`.
    pub fn tube_contains(&self, power: i64, x: &SpacePoint) -> Result<bool> {
        let max = match self.kind {
            TubeKind::HyperbolicTube => self.m_g.unwrap_or(0).max(1),
            TubeKind::ParabolicCusp => u64::MAX,
        };
        if power < 1 || power as u64 > max {
            return Err(Error::PowerOutOfRange { power, max });
        }
        let gp = self.generator.pow(power);
        Ok(distance(x, &gp.apply(x)) <= self.eps + TOL_POINT)
    }

    /// Membership in the union `script-T_eps(g)` over the relevant powers.
    pub fn cusp_contains(&self, x: &SpacePoint) -> bool {
        let limit = match self.kind {
            TubeKind::HyperbolicTube => self.m_g.unwrap_or(0),
            TubeKind::ParabolicCusp => I_MAX,
        };
        let mut y = x.clone();
        let mut history = [f64::NAN; 3];
        for i in 1..=limit {
            y = self.generator.apply(&y);
            let d = distance(x, &y);
            if d <= self.eps + TOL_POINT {
                return true;
            }
            history = [history[1], history[2], d];
            // displacement along a cyclic orbit is convex in the power
            if self.kind == TubeKind::ParabolicCusp && i >= 3 && history[0] < history[1] && history[1] < history[2] {
                return false;
            }
        }
        false
    }

    /// Sample points on the boundary of the core (for coordinate dumps).
    pub fn sample_boundary(&self, count: usize) -> Vec<SpacePoint> {
        let mut out = Vec::new();
        match &self.core {
            Some(Core::Axis { axis, radius }) => {
                let basis = normal_basis(axis);
                for k in 0..count {
                    let t = k as f64 - (count as f64 - 1.0) / 2.0;
                    let p = axis.point_at(t);
                    let dir = &basis[k % basis.len()] * if k % 2 == 0 { 1.0 } else { -1.0 };
                    if let Ok(q) = p.exp(&dir, *radius) {
                        out.push(q);
                    }
                }
            }
            Some(Core::Horoball { center, level }) => {
                let dim = center.dim();
                let mut anti = center.coords().clone();
                for i in 0..dim {
                    anti[i] = -anti[i];
                }
                let Ok(line) = GeodesicLine::new(center.clone(), IdealPoint::from_null(anti)) else { return out };
                let p = horoball_exit(&line, center, *level, true);
                let mut q = p;
                for _ in 0..count {
                    out.push(q.clone());
                    q = self.generator.apply(&q);
                }
            }
            None => {}
        }
        out
    }

    fn check_disjoint_fixed(&self, other: &TubeDescriptor) -> Result<()> {
        for a in &self.fixed_ideal {
            for b in &other.fixed_ideal {
                if a.approx_eq(b, 1e-9) {
                    return Err(Error::SharedFixedPoint);
                }
            }
        }
        Ok(())
    }

    fn core_or_err(&self) -> Result<&Core> {
        self.core.as_ref().ok_or(Error::TauTooLarge { tau: self.tau, limit: self.eps / 10.0 })
    }
}

/// A distance lower bound, with whether it is backed by a closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubeDistance {
    pub value: f64,
    pub certified: bool,
}

fn safety(v: f64) -> f64 {
    v - 10.0 * TOL_POINT * (1.0 + v.abs())
}

/// `min_t -<gamma(t), xi>` over the line.
fn min_busemann_on_line(line: &GeodesicLine, xi: &IdealPoint) -> f64 {
    let a = -line.plus.inner(xi);
    let b = -line.minus.inner(xi);
    2.0 * (a * b).sqrt() / line.norm_factor()
}

/// Distance between two cores (closed forms, no safety margin).
pub fn core_distance(c1: &Core, c2: &Core) -> Result<f64> {
    Ok(match (c1, c2) {
        (Core::Axis { axis: a1, radius: r1 }, Core::Axis { axis: a2, radius: r2 }) => {
            let (d, _, _) = line_distance(a1, a2).map_err(|_| Error::SharedFixedPoint)?;
            d - r1 - r2
        }
        (Core::Horoball { center: c1, level: s1 }, Core::Horoball { center: c2, level: s2 }) => {
            if c1.approx_eq(c2, 1e-12) {
                return Err(Error::SharedFixedPoint);
            }
            (-c1.inner(c2) / (2.0 * s1 * s2)).ln()
        }
        (Core::Axis { axis, radius }, Core::Horoball { center, level })
        | (Core::Horoball { center, level }, Core::Axis { axis, radius }) => {
            if axis.contains_ideal(center, 1e-12) {
                return Err(Error::SharedFixedPoint);
            }
            (min_busemann_on_line(axis, center) / level).ln() - radius
        }
    })
}

/// `-<x, L y>` for ideal points, or `SharedFixedPoint` when it vanishes to working precision.
fn pulled_inner(x: &IdealPoint, l: &DMatrix<f64>, y: &IdealPoint) -> Result<f64> {
    let ly = l * y.coords();
    let v = -minkowski(x.coords(), &ly);
    if !(v > 8.0 * f64::EPSILON * x.coords().norm() * ly.norm()) {
        return Err(Error::SharedFixedPoint);
    }
    Ok(v)
}

fn acosh_large(ch: f64) -> f64 {
    if ch < 1e8 {
        ch.max(1.0).acosh()
    } else {
        ch.ln() + std::f64::consts::LN_2
    }
}

/// Distance between `c1` and `p c2`. Transported endpoints are never normalized:
/// every quantity is a homogeneous expression in `<x, L_p y>`, which keeps its
/// relative precision however far `p` moves the second core.
pub fn transported_core_distance(c1: &Core, c2: &Core, p: &Isometry) -> Result<f64> {
    let l = p.lorentz_matrix();
    Ok(match (c1, c2) {
        (Core::Axis { axis: a1, radius: r1 }, Core::Axis { axis: a2, radius: r2 }) => {
            let a = pulled_inner(&a1.plus, l, &a2.plus)?;
            let b = pulled_inner(&a1.plus, l, &a2.minus)?;
            let c = pulled_inner(&a1.minus, l, &a2.plus)?;
            let d = pulled_inner(&a1.minus, l, &a2.minus)?;
            let ch = 2.0 * ((a * d).sqrt() + (b * c).sqrt()) / (a1.norm_factor() * a2.norm_factor());
            acosh_large(ch) - r1 - r2
        }
        (Core::Horoball { center: x1, level: s1 }, Core::Horoball { center: x2, level: s2 }) => {
            (pulled_inner(x1, l, x2)? / (2.0 * s1 * s2)).ln()
        }
        (Core::Axis { axis, radius }, Core::Horoball { center, level }) => {
            let a = pulled_inner(&axis.plus, l, center)?;
            let b = pulled_inner(&axis.minus, l, center)?;
            (2.0 * (a * b).sqrt() / axis.norm_factor() / level).ln() - radius
        }
        (Core::Horoball { center, level }, Core::Axis { axis, radius }) => {
            let a = pulled_inner(center, l, &axis.plus)?;
            let b = pulled_inner(center, l, &axis.minus)?;
            (2.0 * (a * b).sqrt() / axis.norm_factor() / level).ln() - radius
        }
    })
}

/// The common perpendicular from `c1` to `p c2`, oriented away from `c1` and
/// represented by endpoints that are accurate near `c1`.
pub fn closest_line_transported(c1: &Core, c2: &Core, p: &Isometry) -> Result<GeodesicLine> {
    let l = p.lorentz_matrix();
    match (c1, c2) {
        (_, Core::Horoball { .. }) => closest_line(c1, &c2.transformed(p)),
        (Core::Axis { axis: a1, .. }, Core::Axis { axis: a2, .. }) => {
            let a = pulled_inner(&a1.plus, l, &a2.plus)?;
            let b = pulled_inner(&a1.plus, l, &a2.minus)?;
            let c = pulled_inner(&a1.minus, l, &a2.plus)?;
            let d = pulled_inner(&a1.minus, l, &a2.minus)?;
            // feet of the common perpendicular on a1 and (before transport) on a2
            let s = 0.25 * (d * c / (a * b)).ln();
            let t = 0.25 * (d * b / (a * c)).ln();
            let x = a1.point_at(s);
            let q = l * a2.point_at(t).coords();
            let u = &q + x.coords() * minkowski(&q, x.coords());
            if !(minkowski(&u, &u) > 1e-20 * q.norm_squared()) {
                return Err(Error::HypothesisGapMissing { gap: 0.0, required: 0.0 });
            }
            GeodesicLine::through(&x, &x.exp(&u, 1.0)?)
        }
        (Core::Horoball { center, .. }, Core::Axis { axis, .. }) => {
            let a = pulled_inner(center, l, &axis.plus)?;
            let b = pulled_inner(center, l, &axis.minus)?;
            let q = l * axis.point_at(0.5 * (b / a).ln()).coords();
            // the far endpoint of the geodesic from `center` through q
            let qx = minkowski(&q, center.coords());
            let far = &q + center.coords() / (2.0 * qx);
            GeodesicLine::new(center.clone(), IdealPoint::from_null(far))
        }
    }
}

/// Certified lower bound on `d(script-T_eps(g1), script-T_eps(g2))`.
pub fn tube_distance_lower(t1: &TubeDescriptor, t2: &TubeDescriptor) -> Result<TubeDistance> {
    t1.check_disjoint_fixed(t2)?;
    let raw = core_distance(t1.core_or_err()?, t2.core_or_err()?)?;
    Ok(TubeDistance { value: certified_lower(raw), certified: true })
}

/// Raw closed-form distance minus a relative safety margin, clamped at 0.
pub fn certified_lower(raw: f64) -> f64 {
    safety(raw).max(0.0)
}

/// `max(0, tube_distance_lower - 2 q_hull)`.
pub fn hull_distance_lower(t1: &TubeDescriptor, t2: &TubeDescriptor, c: &PaperConstants) -> Result<TubeDistance> {
    let d = tube_distance_lower(t1, t2)?;
    Ok(hull_from_tube(d, c))
}

pub fn hull_from_tube(d: TubeDistance, c: &PaperConstants) -> TubeDistance {
    TubeDistance { value: (d.value - 2.0 * c.q_hull).max(0.0), certified: d.certified }
}

/// Point of `line` on the horosphere `-<x, xi> = level`, where `xi` is the minus
/// (`at_minus`) or plus endpoint of the line.
fn horoball_exit(line: &GeodesicLine, xi: &IdealPoint, level: f64, at_minus: bool) -> SpacePoint {
    let norm = line.norm_factor();
    // -<gamma(t), xi> = e^{+-t} * (-<other end, xi>) / norm
    let other = if at_minus { &line.plus } else { &line.minus };
    let c = -other.inner(xi);
    let t = (level * norm / c).ln();
    line.point_at(if at_minus { t } else { -t })
}

/// Where `line` leaves `core`. The core sits at the minus end of the line when
/// `at_minus`: an axis perpendicular to the line, or a horoball centered at that endpoint.
pub fn exit_from_core(core: &Core, line: &GeodesicLine, at_minus: bool) -> Result<SpacePoint> {
    match core {
        Core::Axis { axis, radius } => {
            let (_, s, _) = line_distance(line, axis)?;
            Ok(line.point_at(if at_minus { s + radius } else { s - radius }))
        }
        Core::Horoball { center, level } => Ok(horoball_exit(line, center, *level, at_minus)),
    }
}

pub fn exit_point(tube: &TubeDescriptor, line: &GeodesicLine, at_minus: bool) -> Result<SpacePoint> {
    exit_from_core(tube.core_or_err()?, line, at_minus)
}

/// The geodesic realizing the distance between two cores, oriented from the first to the second.
pub fn closest_line(c1: &Core, c2: &Core) -> Result<GeodesicLine> {
    match (c1, c2) {
        (Core::Axis { axis: a1, .. }, Core::Axis { axis: a2, .. }) => {
            let (d, s, t) = line_distance(a1, a2)?;
            if d < TOL_POINT {
                return Err(Error::HypothesisGapMissing { gap: 0.0, required: 0.0 });
            }
            GeodesicLine::through(&a1.point_at(s), &a2.point_at(t))
        }
        (Core::Horoball { center: x1, .. }, Core::Horoball { center: x2, .. }) => GeodesicLine::new(x1.clone(), x2.clone()),
        (Core::Axis { axis, .. }, Core::Horoball { center, .. }) => {
            let foot = project_to_line(Target::Ideal(center), axis)?;
            let l = GeodesicLine::through(&foot, &foot_toward(&foot, center)?)?;
            GeodesicLine::new(l.minus, center.clone())
        }
        (Core::Horoball { center, .. }, Core::Axis { axis, .. }) => {
            let foot = project_to_line(Target::Ideal(center), axis)?;
            let l = GeodesicLine::through(&foot, &foot_toward(&foot, center)?)?;
            GeodesicLine::new(center.clone(), l.minus)
        }
    }
}

/// Endpoints of the shortest segment between the cores, and the geodesic through
/// them oriented from the first tube to the second.
pub fn closest_points(t1: &TubeDescriptor, t2: &TubeDescriptor) -> Result<(SpacePoint, SpacePoint, GeodesicLine)> {
    t1.check_disjoint_fixed(t2)?;
    let (c1, c2) = (t1.core_or_err()?, t2.core_or_err()?);
    let line = closest_line(c1, c2)?;
    Ok((exit_from_core(c1, &line, true)?, exit_from_core(c2, &line, false)?, line))
}

/// A point one unit from `p` towards the ideal point `xi`.
fn foot_toward(p: &SpacePoint, xi: &IdealPoint) -> Result<SpacePoint> {
    p.exp(xi.coords(), 1.0)
}

/// Result of the constructive small-displacement lemma.
#[derive(Debug, Clone, Serialize)]
pub struct SmallDisplacement {
    pub b: SpacePoint,
    pub displacement_b: f64,
    pub distance_ab: f64,
    pub bound: f64,
    pub within_bound: bool,
}

/// Finds `B` on the segment from `A` to its projection on the axis of `h` with
/// `d(B, h B) = eps/3`, by bisection on the (monotone) displacement.
pub fn find_small_displacement_point(a: &SpacePoint, h: &Isometry, eps: f64) -> Result<SmallDisplacement> {
    if !(eps > 0.0) {
        return Err(Error::NonpositiveEps(eps));
    }
    let class = h.classify()?;
    if class.kind != Kind::Hyperbolic {
        return Err(Error::WrongKind { expected: "hyperbolic", found: class.kind.to_string() });
    }
    if class.tau > eps / 10.0 {
        return Err(Error::TauTooLarge { tau: class.tau, limit: eps / 10.0 });
    }
    let da = h.displacement(a);
    if (da - eps).abs() > 10.0 * TOL_POINT * eps.max(1.0) {
        return Err(Error::PreconditionDisplacement { found: da, expected: eps });
    }
    let axis = class.axis.expect("hyperbolic has an axis");
    let c = project_to_line(Target::Point(a), &axis)?;
    let total = distance(a, &c);
    let target = eps / 3.0;
    let f = |s: f64| -> Result<(f64, SpacePoint)> {
        let p = a.toward(&c, s * total)?;
        Ok((h.displacement(&p) - target, p))
    };
    // coarse monotonicity witness before bisecting
    let mut prev = f64::INFINITY;
    for k in 0..=16 {
        let (v, _) = f(k as f64 / 16.0)?;
        if v > prev + 1e-12 {
            return Err(Error::MonotonicityViolation);
        }
        prev = v;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if f(hi)?.0 > 0.0 {
        return Err(Error::MonotonicityViolation);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)?.0 > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    let (_, b) = f(0.5 * (lo + hi))?;
    let displacement_b = h.displacement(&b);
    let distance_ab = distance(a, &b);
    let bound = r_margulis(eps)?;
    Ok(SmallDisplacement { b, displacement_b, distance_ab, bound, within_bound: distance_ab <= bound })
}

/// Point at distance `r` from `axis.point_at(t)` in the normal direction `basis[k]`.
pub fn offset_from_axis(axis: &GeodesicLine, t: f64, direction: &DVector<f64>, r: f64) -> Result<SpacePoint> {
    let p = axis.point_at(t);
    let tan = axis.tangent_at(t);
    // remove the tangential component so the step is orthogonal to the axis
    let d = direction - &tan * minkowski(direction, &tan);
    p.exp(&d, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isometry::{sl2_diagonal, sl2_translation_on_unit_circle};
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn dir(v: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(v)
    }

    #[test]
    fn radius_examples() {
        assert_relative_eq!(tube_radius_h2(0.1, 0.1).unwrap(), 0.0, epsilon = 1e-7);
        assert_relative_eq!(tube_radius_h2(0.004, 0.1).unwrap(), 3.912039063531336111, epsilon = 1e-12);
        assert!(tube_radius_h2(0.002, 0.1).unwrap() > tube_radius_h2(0.004, 0.1).unwrap());
        assert!(matches!(tube_radius_h2(0.2, 0.1), Err(Error::TauExceedsEps { .. })));
    }

    #[test]
    fn radius_solves_displacement_equation() {
        // independent root of d(x_r, g x_r) = eps by bisection over r
        let g = sl2_diagonal(0.004);
        let axis = g.classify().unwrap().axis.unwrap();
        let n = dir(&[0.0, 1.0, 0.0]);
        let disp = |r: f64| g.displacement(&offset_from_axis(&axis, 0.3, &n, r).unwrap()) - 0.1;
        let (mut lo, mut hi) = (0.0, 10.0);
        for _ in 0..100 {
            let m = 0.5 * (lo + hi);
            if disp(m) > 0.0 {
                hi = m
            } else {
                lo = m
            }
        }
        assert_relative_eq!(lo, tube_radius_h2(0.004, 0.1).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn tube_membership_examples() {
        let g = sl2_diagonal(0.004);
        let t = TubeDescriptor::new(&g, 0.1).unwrap();
        assert_eq!(t.m_g, Some(2));
        let axis = t.axis.clone().unwrap();
        assert!(t.tube_contains(1, &axis.point_at(0.7)).unwrap());
        let r = tube_radius_h2(0.004, 0.1).unwrap();
        let far = offset_from_axis(&axis, 0.0, &dir(&[0.0, 1.0, 0.0]), 10.0 * r).unwrap();
        assert!(!t.tube_contains(1, &far).unwrap());
        assert!(matches!(t.tube_contains(3, &far), Err(Error::PowerOutOfRange { power: 3, max: 2 })));
        assert!(matches!(t.tube_contains(0, &far), Err(Error::PowerOutOfRange { .. })));
        // the union reduces to the first power
        for k in 0..50 {
            let rr = r * (0.9 + 0.004 * k as f64);
            let p = offset_from_axis(&axis, 0.1 * k as f64, &dir(&[0.0, 1.0, 0.0]), rr).unwrap();
            assert_eq!(t.cusp_contains(&p), t.tube_contains(1, &p).unwrap());
        }
    }

    #[test]
    fn parabolic_height() {
        let p = Isometry::sl2_real([1.0, 1.0, 0.0, 1.0]).unwrap();
        let t = TubeDescriptor::new(&p, 0.1).unwrap();
        let y = 1.0 / (2.0 * 0.05f64.sinh());
        let x = SpacePoint::from_upper_half_plane(0.37, y).unwrap();
        assert_relative_eq!(p.displacement(&x), 0.1, epsilon = 1e-12);
        assert!(t.tube_contains(1, &x).unwrap());
        assert!(t.cusp_contains(&x));
        let below = SpacePoint::from_upper_half_plane(0.37, 0.99 * y).unwrap();
        assert!(!t.cusp_contains(&below));
        let far = SpacePoint::from_upper_half_plane(30.0, 0.01).unwrap();
        assert!(!t.cusp_contains(&far));
        match t.core.unwrap() {
            Core::Horoball { level, .. } => assert_relative_eq!(1.0 / level, y, max_relative = 1e-12),
            _ => panic!(),
        }
    }

    #[test]
    fn equivariance_of_membership() {
        let g = sl2_diagonal(0.004);
        let h = Isometry::sl2_real([2.0, 1.0, 1.0, 1.0]).unwrap();
        let t = TubeDescriptor::new(&g, 0.1).unwrap();
        let tc = TubeDescriptor::new(&g.conjugate_by(&h).unwrap(), 0.1).unwrap();
        for k in 0..40 {
            let x = SpacePoint::from_upper_half_plane(-2.0 + 0.1 * k as f64, 0.5 + 0.2 * k as f64).unwrap();
            assert_eq!(t.tube_contains(1, &x).unwrap(), tc.tube_contains(1, &h.apply(&x)).unwrap());
        }
    }

    #[test]
    fn transported_descriptor_matches_recomputed() {
        let h = Isometry::sl2_real([2.0, 1.0, 1.0, 1.0]).unwrap();
        let third = TubeDescriptor::new(&sl2_diagonal(0.003).conjugate_by(&sl2_translation_on_unit_circle(-6.0)).unwrap(), 0.1).unwrap();
        for g in [sl2_diagonal(0.004), Isometry::sl2_real([1.0, 1.0, 0.0, 1.0]).unwrap()] {
            let t = TubeDescriptor::new(&g, 0.1).unwrap();
            let moved = t.conjugated(&h).unwrap();
            let fresh = TubeDescriptor::new(&g.conjugate_by(&h).unwrap(), 0.1).unwrap();
            let a = tube_distance_lower(&moved, &third).unwrap().value;
            let b = tube_distance_lower(&fresh, &third).unwrap().value;
            assert_relative_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn transported_distance_far_away() {
        // axes 40 apart: normalized endpoints of the far axis would coincide in f64
        let g = sl2_diagonal(0.004);
        let t = TubeDescriptor::new(&g, 0.1).unwrap();
        let core = t.core.clone().unwrap();
        let r = tube_radius_h2(0.004, 0.1).unwrap();
        for shift in [3.0, 12.0, 40.0, 300.0] {
            let p = sl2_translation_on_unit_circle(shift);
            let d = transported_core_distance(&core, &core, &p).unwrap();
            assert_relative_eq!(d, shift - 2.0 * r, epsilon = 1e-9 * shift.max(1.0));
            if shift < 100.0 {
                let line = closest_line_transported(&core, &core, &p).unwrap();
                let y = exit_from_core(&core, &line, true).unwrap();
                assert_relative_eq!(g.displacement(&y), 0.1, epsilon = 1e-9);
                // the perpendicular runs along the unit circle through i
                assert!(crate::geometry::distance_to_line(&SpacePoint::origin(2), &line) < 1e-9);
            }
        }
        let parab = Isometry::sl2_real([1.0, 1.0, 0.0, 1.0]).unwrap();
        let hc = TubeDescriptor::new(&parab, 0.1).unwrap().core.unwrap();
        let p = sl2_translation_on_unit_circle(30.0);
        let direct = core_distance(&core, &hc.transformed(&p)).unwrap();
        assert_relative_eq!(transported_core_distance(&core, &hc, &p).unwrap(), direct, epsilon = 1e-8);
        let back = transported_core_distance(&hc, &core, &p.inverse()).unwrap();
        assert_relative_eq!(back, direct, epsilon = 1e-8);
        let line = closest_line_transported(&hc, &core, &p.inverse()).unwrap();
        let z = exit_from_core(&hc, &line, true).unwrap();
        assert_relative_eq!(parab.displacement(&z), 0.1, epsilon = 1e-9);
    }

    #[test]
    fn distance_examples() {
        let g = sl2_diagonal(0.004);
        let t1 = TubeDescriptor::new(&g, 0.1).unwrap();
        // conjugate by a translation of length 10 along the perpendicular unit circle
        let k = sl2_translation_on_unit_circle(10.0);
        let t2 = TubeDescriptor::new(&g.conjugate_by(&k).unwrap(), 0.1).unwrap();
        let d = tube_distance_lower(&t1, &t2).unwrap();
        let r = tube_radius_h2(0.004, 0.1).unwrap();
        assert!(d.value <= 10.0 - 2.0 * r && d.value > 10.0 - 2.0 * r - 1e-7);
        assert!(d.certified);
        let c = PaperConstants::default();
        let hd = hull_distance_lower(&t1, &t2, &c).unwrap();
        assert_eq!(hd.value, 0.0);
        let same = TubeDescriptor::new(&g.pow(2), 0.1).unwrap();
        assert_eq!(tube_distance_lower(&t1, &same), Err(Error::SharedFixedPoint));
        let near = TubeDescriptor::new(&g.conjugate_by(&sl2_translation_on_unit_circle(1.0)).unwrap(), 0.1).unwrap();
        assert_eq!(tube_distance_lower(&t1, &near).unwrap().value, 0.0);
        // the closest points realize the bound
        let (y, z, _) = closest_points(&t1, &t2).unwrap();
        assert_relative_eq!(distance(&y, &z), 10.0 - 2.0 * r, epsilon = 1e-8);
        assert_relative_eq!(g.displacement(&y), 0.1, epsilon = 1e-9);
    }

    #[test]
    fn horoball_distance_matches_heights() {
        // cusps at infinity (height H) and at 0 (diameter D) are ln(H / D) apart
        let a = Isometry::sl2_real([1.0, 2.0, 0.0, 1.0]).unwrap();
        let b = Isometry::sl2_real([1.0, 0.0, 2.0, 1.0]).unwrap();
        let ta = TubeDescriptor::new(&a, 0.1).unwrap();
        let tb = TubeDescriptor::new(&b, 0.1).unwrap();
        let h = 2.0 / (2.0 * 0.05f64.sinh());
        // b = J a^-1 J^-1 with J(z) = -1/z maps height h to a disk of diameter 1/h
        let d = tube_distance_lower(&ta, &tb).unwrap().value;
        assert!(d <= (h * h).ln() && d > (h * h).ln() - 1e-7);
        let (y, z, _) = closest_points(&ta, &tb).unwrap();
        assert_relative_eq!(distance(&y, &z), (h * h).ln(), epsilon = 1e-9);
        assert_relative_eq!(a.displacement(&y), 0.1, epsilon = 1e-10);
        assert_relative_eq!(b.displacement(&z), 0.1, epsilon = 1e-10);
    }

    #[test]
    fn small_displacement_point_example() {
        let h = sl2_diagonal(0.004);
        let axis = h.classify().unwrap().axis.unwrap();
        let r = tube_radius_h2(0.004, 0.1).unwrap();
        let a = offset_from_axis(&axis, 0.0, &dir(&[0.0, 1.0, 0.0]), r).unwrap();
        let s = find_small_displacement_point(&a, &h, 0.1).unwrap();
        assert_relative_eq!(s.displacement_b, 0.1 / 3.0, epsilon = 1e-9);
        let rb = tube_radius_h2(0.004, 0.1 / 3.0).unwrap();
        assert_relative_eq!(rb, 2.809837081062197507, epsilon = 1e-12);
        assert_relative_eq!(s.distance_ab, r - rb, epsilon = 1e-8);
        assert!(s.within_bound);
        let off = offset_from_axis(&axis, 0.0, &dir(&[0.0, 1.0, 0.0]), r + 0.5).unwrap();
        assert!(matches!(find_small_displacement_point(&off, &h, 0.1), Err(Error::PreconditionDisplacement { .. })));
    }

    #[test]
    fn loxodromic_tube_in_h3() {
        // tau = 0.004 with a rotation by 0.5 about the axis
        let lam = Complex64::from_polar((0.002f64).exp(), 0.25);
        let g = Isometry::sl2_complex([lam, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), lam.inv()]).unwrap();
        let t = TubeDescriptor::new(&g, 0.1).unwrap();
        assert!(!t.round);
        let m = t.m_g.unwrap();
        let outer = match t.core.clone().unwrap() {
            Core::Axis { radius, .. } => radius,
            _ => panic!(),
        };
        // every sampled point beyond the outer radius is outside all powers
        let axis = t.axis.clone().unwrap();
        let basis = normal_basis(&axis);
        for k in 0..24 {
            let th = k as f64 * 0.26;
            let d = &basis[0] * th.cos() + &basis[1] * th.sin();
            let p = offset_from_axis(&axis, 0.2 * k as f64, &d, outer + 1e-6).unwrap();
            for i in 1..=m {
                assert!(!t.tube_contains(i as i64, &p).unwrap());
            }
            assert!(!t.cusp_contains(&p));
        }
        // and the radius is attained for some power
        let i_best = (1..=m).max_by(|&a, &b| t.power_radius(a).partial_cmp(&t.power_radius(b)).unwrap()).unwrap();
        assert_relative_eq!(t.power_radius(i_best).unwrap(), outer, epsilon = 1e-12);
    }
}
