//! Two ping-pong constructions.
//!
//! Long translations: the walls `U+- = H(g^{+-N} x, x)`, `V+- = H(h^{+-N} y, y)` built
//! from the mutual projections of the two axes are pairwise disjoint once
//! `N tau >= L_alpha + 5 + 2 delta`, and `g^N`, `h^N` play ping-pong on them.
//!
//! Short translations: conjugates `h^d g h^-d` eventually have Margulis tubes far
//! from the tube of `g`, and alternating words then trace broken geodesics with
//! long segments and right-angled corners, which are quasigeodesics.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constants::{case1_n, delta_hyp, k_bound, PaperConstants};
use crate::error::{Error, Result};
use crate::geometry::{angle, distance, line_distance, minkowski, project_to_line, GeodesicLine, HalfSpace, SpacePoint, Target, TOL_POINT};
use crate::isometry::{evaluate_word, Isometry, Kind};
use crate::tubes::{certified_lower, closest_line_transported, exit_from_core, transported_core_distance, TubeDescriptor};
use crate::word::Word;

/// Separation required between sampled walls.
pub const WALL_MARGIN: f64 = 1e-5;
/// Boundary samples per ordered pair of walls.
pub const WALL_SAMPLES: usize = 10_000;
const INCLUSION_SAMPLES: usize = 500;
const SAMPLE_SEED: u64 = 0x5107_7e11;
/// Geodesic radius on each bisector explored by the samples.
const SAMPLE_RADIUS: f64 = 6.0;
/// Corner angles must reach `pi/2` up to this slack.
pub const ANGLE_SLACK: f64 = 1e-6;
/// Relative tolerance for "equal" translation lengths of floating inputs.
pub const TOL_TAU_EQUAL: f64 = 1e-6;
/// Practical cap on conjugates tried, far below the packing bound for default constants.
pub const SEARCH_CAP: u64 = 50_000_000;
/// Alternating test words (over `a = g`, `b = f`) checked before a short-translation certificate is issued.
pub const PATH_BATTERY: [&str; 4] = ["ab", "aB", "aaB", "abAB"];
/// Powers `w^N` checked against the quasigeodesic lower bound.
pub const QIW_POWERS: u32 = 5;

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionData {
    pub x_minus: SpacePoint,
    pub x_plus: SpacePoint,
    pub y_minus: SpacePoint,
    pub y_plus: SpacePoint,
    pub l_alpha: f64,
    pub l_beta: f64,
}

/// `x+-`: projections of the endpoints of `beta` to `alpha`; `y+-`: projections of `x+-` back to `beta`.
pub fn axis_projection_data(alpha: &GeodesicLine, beta: &GeodesicLine) -> Result<ProjectionData> {
    if alpha.contains_ideal(&beta.minus, 1e-9) || alpha.contains_ideal(&beta.plus, 1e-9) {
        return Err(Error::SharedEndpoint);
    }
    let x_minus = project_to_line(Target::Ideal(&beta.minus), alpha)?;
    let x_plus = project_to_line(Target::Ideal(&beta.plus), alpha)?;
    let y_minus = project_to_line(Target::Point(&x_minus), beta)?;
    let y_plus = project_to_line(Target::Point(&x_plus), beta)?;
    let l_alpha = distance(&x_minus, &x_plus);
    let l_beta = distance(&y_minus, &y_plus);
    Ok(ProjectionData { x_minus, x_plus, y_minus, y_plus, l_alpha, l_beta })
}

#[derive(Debug, Clone, Serialize)]
pub struct WallCheck {
    pub first: String,
    pub second: String,
    /// Distance between the bounding hyperplanes, `arccosh |<n1, n2>|`.
    pub exact_gap: f64,
    /// Smallest distance from a sampled wall point to the other half-space.
    pub sampled_margin: f64,
    pub samples: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InclusionCheck {
    pub generator: String,
    pub target: String,
    pub samples: usize,
    /// Smallest signed depth of an image point inside the target.
    pub worst_depth: f64,
    pub passed: bool,
}

/// One of the four walls, stored in the home frame of its generator.
#[derive(Debug, Clone, Serialize)]
pub struct WallData {
    pub name: String,
    /// `g` or `h`: whose home frame `half_space` is written in.
    pub frame: char,
    pub half_space: HalfSpace,
    /// Unit normal in world coordinates; the half-space is `{<x, n> >= 0}`.
    pub world_normal: Vec<f64>,
}

/// Long-translation certificate.
///
/// `x` and the `U` walls are in the home frame of `g`, `y` and the `V` walls in that of
/// `h`; beyond distance about 18 from the origin hyperboloid coordinates of points no
/// longer resolve the radial direction, so far data is never carried to a common frame.
#[derive(Debug, Clone, Serialize)]
pub struct Case1Data {
    pub g: Isometry,
    pub h: Isometry,
    pub tau: f64,
    pub x: SpacePoint,
    pub y: SpacePoint,
    /// Distance between the axes of `g` and `h`.
    pub axis_distance: f64,
    pub projection: ProjectionData,
    #[serde(rename = "N")]
    pub n: u64,
    pub n_direct: u64,
    pub n_paper: u64,
    /// `U+`, `U-`, `V+`, `V-`.
    pub walls: [WallData; 4],
    pub disjointness: Vec<WallCheck>,
    pub inclusions: Vec<InclusionCheck>,
    #[serde(skip)]
    pub frames: (Framed, Framed),
}

pub const WALL_NAMES: [&str; 4] = ["U+", "U-", "V+", "V-"];

fn hyperbolic_class(g: &Isometry) -> Result<(f64, GeodesicLine)> {
    let class = g.classify()?;
    match class.kind {
        Kind::Hyperbolic => Ok((class.tau, class.axis.expect("hyperbolic has an axis"))),
        k => Err(Error::WrongKind { expected: "hyperbolic", found: k.to_string() }),
    }
}

fn unit(n: DVector<f64>) -> DVector<f64> {
    let nn = minkowski(&n, &n).sqrt();
    n / nn
}

/// Random point of the bisector of `h` within `SAMPLE_RADIUS` of its center.
fn bisector_sample(h: &HalfSpace, rng: &mut ChaCha8Rng) -> Result<SpacePoint> {
    let dim = h.nearer.dim() + 1;
    loop {
        let dir = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0));
        let t = SAMPLE_RADIUS * rng.gen::<f64>();
        match h.bisector_point(&dir, t) {
            Ok(p) => return Ok(p),
            Err(Error::InvalidPoint(_)) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Foot on the first wall of the common perpendicular of two ultraparallel walls.
fn perpendicular_foot(n1: &DVector<f64>, n2: &DVector<f64>) -> Option<SpacePoint> {
    let c = minkowski(n1, n2);
    if c.abs() <= 1.0 {
        return None;
    }
    let b = 1.0 / (c * c - 1.0).sqrt();
    let v = n2 * b - n1 * (b * c);
    let v = if v[v.len() - 1] < 0.0 { -v } else { v };
    SpacePoint::renormalize(v).ok()
}

/// A wall kept in the home frame of its generator, with its unit normal in both frames.
struct Wall {
    hs: HalfSpace,
    frame: usize,
    normals: [DVector<f64>; 2],
}

impl Wall {
    fn new(hs: HalfSpace, frame: usize, to_other: &Isometry) -> Self {
        let n = unit(hs.normal());
        let moved = to_other.lorentz_matrix() * &n;
        let normals = if frame == 0 { [n, moved] } else { [moved, n] };
        Self { hs, frame, normals }
    }

    /// Signed distance to a point given in frame `f`, positive inside.
    fn signed(&self, p: &SpacePoint, f: usize) -> f64 {
        minkowski(p.coords(), &self.normals[f]).asinh()
    }
}

/// Relative frame changes: `moves[0]` takes g-home coordinates to h-home coordinates.
struct FramePair {
    moves: [Isometry; 2],
}

impl FramePair {
    fn carry(&self, p: &SpacePoint, from: usize, to: usize) -> Result<SpacePoint> {
        if from == to {
            Ok(p.clone())
        } else {
            self.moves[from].try_apply(p)
        }
    }
}

fn check_walls(a: &Wall, b: &Wall, names: (&str, &str), rng: &mut ChaCha8Rng) -> Result<WallCheck> {
    let c = minkowski(&a.normals[a.frame], &b.normals[a.frame]);
    let ultraparallel = c.abs() > 1.0;
    // ultraparallel walls bound disjoint half-spaces iff neither contains the other wall
    let ca = a.hs.bisector_center();
    let cb = b.hs.bisector_center();
    let outside = a.signed(&cb, b.frame) < 0.0 && b.signed(&ca, a.frame) < 0.0;
    let exact_gap = if ultraparallel && outside { c.abs().acosh() } else { 0.0 };
    let mut margin = f64::INFINITY;
    let mut samples = 0;
    for (wall, other) in [(a, b), (b, a)] {
        let f = wall.frame;
        let mut points = vec![wall.hs.bisector_center()];
        points.extend(perpendicular_foot(&wall.normals[f], &other.normals[f]));
        for _ in 0..WALL_SAMPLES / 2 {
            points.push(bisector_sample(&wall.hs, rng)?);
        }
        for p in points {
            margin = margin.min(-other.signed(&p, f));
            samples += 1;
        }
    }
    Ok(WallCheck {
        first: names.0.into(),
        second: names.1.into(),
        exact_gap,
        sampled_margin: margin,
        samples,
        passed: exact_gap > WALL_MARGIN && margin > WALL_MARGIN,
    })
}

/// A random point of the half-space `h`, up to depth 4 behind its wall.
fn interior_sample(w: &Wall, rng: &mut ChaCha8Rng) -> Result<SpacePoint> {
    let p = bisector_sample(&w.hs, rng)?;
    p.exp(&w.normals[w.frame], 4.0 * rng.gen::<f64>())
}

fn check_inclusions(gens: [&Isometry; 4], walls: &[Wall; 4], frames: &FramePair, rng: &mut ChaCha8Rng) -> Result<Vec<InclusionCheck>> {
    // generator k maps every wall except its inverse's into wall k
    let names = ["g^N", "g^-N", "h^N", "h^-N"];
    let opposite = [1, 0, 3, 2];
    let mut out = Vec::new();
    for k in 0..4 {
        let fk = walls[k].frame;
        let mut worst = f64::INFINITY;
        let mut samples = 0;
        for (s, wall) in walls.iter().enumerate() {
            if s == opposite[k] {
                continue;
            }
            for _ in 0..INCLUSION_SAMPLES {
                let p = frames.carry(&interior_sample(wall, rng)?, wall.frame, fk)?;
                worst = worst.min(walls[k].signed(&gens[k].try_apply(&p)?, fk));
                samples += 1;
            }
        }
        out.push(InclusionCheck {
            generator: names[k].into(),
            target: WALL_NAMES[k].into(),
            samples,
            worst_depth: worst,
            passed: worst >= -TOL_POINT,
        });
    }
    Ok(out)
}

/// `ceil((L_alpha + 5 + 2 delta) / tau)`.
pub fn direct_n(l_alpha: f64, tau: f64) -> u64 {
    ((l_alpha + 5.0 + 2.0 * delta_hyp()) / tau).ceil().max(1.0) as u64
}

pub fn case1_certificate(g: &Isometry, h: &Isometry, c: &PaperConstants) -> Result<Case1Data> {
    case1_certificate_framed(&Framed::trivial(g), &Framed::trivial(h), c)
}

/// Long-translation certificate for generators given in frames.
///
/// Walls of `g` are built and sampled where `g.home` lives, walls of `h` where `h.home`
/// lives; only unit normals and sample points cross between the two frames. This keeps
/// far-apart axes (distance 20 and more) within reach of double precision, where the
/// product `conj * home * conj^-1` has lost the position of its axis.
pub fn case1_certificate_framed(gf: &Framed, hf: &Framed, c: &PaperConstants) -> Result<Case1Data> {
    let (tau, alpha) = hyperbolic_class(&gf.home)?;
    let (tau_h, beta) = hyperbolic_class(&hf.home)?;
    if (tau - tau_h).abs() > TOL_TAU_EQUAL * tau.max(1.0) {
        return Err(Error::UnequalTranslationLengths(tau, tau_h));
    }
    if tau < c.lambda_threshold {
        return Err(Error::NotCase1 { tau, lambda: c.lambda_threshold });
    }
    let g_to_h = hf.conj.inverse().compose(&gf.conj)?;
    let frames = FramePair { moves: [g_to_h.clone(), g_to_h.inverse()] };
    let beta_in_g = frames.moves[1].apply_line(&beta);
    if alpha.contains_ideal(&beta_in_g.minus, 1e-9) || alpha.contains_ideal(&beta_in_g.plus, 1e-9) {
        return Err(Error::SharedEndpoint);
    }
    let x_minus = project_to_line(Target::Ideal(&beta_in_g.minus), &alpha)?;
    let x_plus = project_to_line(Target::Ideal(&beta_in_g.plus), &alpha)?;
    let y_minus = project_to_line(Target::Point(&frames.moves[0].try_apply(&x_minus)?), &beta)?;
    let y_plus = project_to_line(Target::Point(&frames.moves[0].try_apply(&x_plus)?), &beta)?;
    let l_alpha = distance(&x_minus, &x_plus);
    let l_beta = distance(&y_minus, &y_plus);
    let x = x_minus.lerp(&x_plus, 0.5)?;
    let y = y_minus.lerp(&y_plus, 0.5)?;

    let n_paper = case1_n(c.eps)?;
    // the uniform bound also satisfies the instance inequality, so the direct N is never larger
    let n_direct = direct_n(l_alpha, tau);
    let n = n_direct;
    let ni = n as i64;
    let home = [gf.home.pow(ni), gf.home.pow(-ni), hf.home.pow(ni), hf.home.pow(-ni)];
    let walls = [
        Wall::new(HalfSpace::new(home[0].try_apply(&x)?, x.clone())?, 0, &frames.moves[0]),
        Wall::new(HalfSpace::new(home[1].try_apply(&x)?, x.clone())?, 0, &frames.moves[0]),
        Wall::new(HalfSpace::new(home[2].try_apply(&y)?, y.clone())?, 1, &frames.moves[1]),
        Wall::new(HalfSpace::new(home[3].try_apply(&y)?, y.clone())?, 1, &frames.moves[1]),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let mut disjointness = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            disjointness.push(check_walls(&walls[i], &walls[j], (WALL_NAMES[i], WALL_NAMES[j]), &mut rng)?);
        }
    }
    if let Some(bad) = disjointness.iter().find(|w| !w.passed) {
        return Err(Error::DisjointnessUnverified(format!(
            "{} and {}: gap {:.3e}, sampled margin {:.3e}",
            bad.first, bad.second, bad.exact_gap, bad.sampled_margin
        )));
    }
    let inclusions = check_inclusions([&home[0], &home[1], &home[2], &home[3]], &walls, &frames, &mut rng)?;
    if let Some(bad) = inclusions.iter().find(|i| !i.passed) {
        return Err(Error::DisjointnessUnverified(format!("{} does not map into {} (depth {:.3e})", bad.generator, bad.target, bad.worst_depth)));
    }

    let conj = [&gf.conj, &gf.conj, &hf.conj, &hf.conj];
    let walls: Vec<WallData> = walls
        .into_iter()
        .enumerate()
        .map(|(k, w)| WallData {
            name: WALL_NAMES[k].into(),
            frame: if w.frame == 0 { 'g' } else { 'h' },
            world_normal: (conj[k].lorentz_matrix() * &w.normals[w.frame]).iter().copied().collect(),
            half_space: w.hs,
        })
        .collect();
    let axis_distance = line_distance(&alpha, &beta_in_g)?.0;
    Ok(Case1Data {
        g: gf.generator()?,
        h: hf.generator()?,
        tau,
        x,
        y,
        axis_distance,
        projection: ProjectionData { x_minus, x_plus, y_minus, y_plus, l_alpha, l_beta },
        n,
        n_direct,
        n_paper,
        walls: walls.try_into().expect("four walls"),
        disjointness,
        inclusions,
        frames: (gf.clone(), hf.clone()),
    })
}

/// Membership of a world point in the closed fundamental domain: outside the interiors of all four walls.
pub fn schottky_domain_contains(d: &Case1Data, x: &SpacePoint) -> bool {
    d.walls.iter().all(|w| minkowski(x.coords(), &DVector::from_column_slice(&w.world_normal)).asinh() <= TOL_POINT)
}

#[derive(Debug, Clone, Serialize)]
pub struct PairSearch {
    pub i: u64,
    pub j: u64,
    /// Certified lower bound on the tube distance.
    pub tube_gap: f64,
    /// `tube_gap - 2 q_hull`.
    pub gap: f64,
    pub k_bound: u64,
}

fn check_short(g: &Isometry, c: &PaperConstants) -> Result<TubeDescriptor> {
    let class = g.classify()?;
    if class.kind == Kind::Elliptic {
        return Err(Error::EllipticInput);
    }
    if class.tau > c.lambda_threshold {
        return Err(Error::NotCase2 { tau: class.tau, lambda: c.lambda_threshold });
    }
    TubeDescriptor::new(g, c.eps)
}

fn shares_fixed_point(g: &Isometry, h: &Isometry) -> Result<bool> {
    let (a, b) = (g.classify()?, h.classify()?);
    Ok(a.fixed_ideal.iter().any(|x| b.fixed_ideal.iter().any(|y| x.approx_eq(y, 1e-9))))
}

/// Finds `d` with `d(Hull T(g), Hull T(h^d g h^-d)) > L`, reported as the pair `(1, 1 + d)`.
///
/// By equivariance the gap of `(g_i, g_j)` depends only on `j - i`, so it suffices to
/// transport the tube of `g` step by step; a hit is confirmed against the tube moved
/// by `h^d` in one product.
pub fn case2_pair_search(g: &Isometry, h: &Isometry, c: &PaperConstants) -> Result<PairSearch> {
    let (tube, _) = search_impl(g, h, c)?;
    Ok(tube)
}

fn search_impl(g: &Isometry, h: &Isometry, c: &PaperConstants) -> Result<(PairSearch, TubeDescriptor)> {
    let tube = check_short(g, c)?;
    if h.classify()?.kind == Kind::Elliptic {
        return Err(Error::EllipticInput);
    }
    if shares_fixed_point(g, h)? {
        return Err(Error::Elementary("shared-fixed-point".into()));
    }
    let kb = k_bound(c.ltg.l, c)?;
    let limit = kb.min(SEARCH_CAP);
    let core0 = tube.core.clone().ok_or(Error::TauTooLarge { tau: tube.tau, limit: c.eps / 10.0 })?;
    let gap_of = |p: &Isometry| -> Result<f64> {
        match transported_core_distance(&core0, &core0, p) {
            Ok(raw) => Ok(certified_lower(raw)),
            Err(Error::SharedFixedPoint) => Err(Error::Elementary("conjugates share a fixed point".into())),
            Err(e) => Err(e),
        }
    };
    let mut moved = Isometry::identity(h.model());
    for d in 1..=limit {
        moved = moved.compose(h)?;
        if gap_of(&moved)? - 2.0 * c.q_hull <= c.ltg.l {
            continue;
        }
        let tube_gap = gap_of(&h.pow(d as i64))?;
        let gap = tube_gap - 2.0 * c.q_hull;
        if gap > c.ltg.l {
            return Ok((PairSearch { i: 1, j: 1 + d, tube_gap, gap, k_bound: kb }, tube));
        }
    }
    Err(Error::SearchExhausted { bound: limit })
}

#[derive(Debug, Clone, Serialize)]
pub struct Case2Data {
    pub g: Isometry,
    pub f: Isometry,
    pub h: Isometry,
    pub i: u64,
    pub j: u64,
    pub tau: f64,
    pub tube_gap: f64,
    pub hull_gap: f64,
    pub required_gap: f64,
    /// `2 |j - i| + 1`, the length of `f` as a word in `g`, `h`.
    pub word_length: u64,
    pub k_bound: u64,
    pub broken_path_report: Vec<PathReport>,
    #[serde(skip)]
    pub frame: Framed,
}

/// An isometry `conj * home * conj^-1` remembered through its factors, so that
/// geometry of `home` can be computed where it lives.
#[derive(Debug, Clone)]
pub struct Framed {
    pub home: Isometry,
    pub conj: Isometry,
}

impl Framed {
    pub fn trivial(f: &Isometry) -> Self {
        Self { home: f.clone(), conj: Isometry::identity(f.model()) }
    }

    pub fn generator(&self) -> Result<Isometry> {
        self.home.conjugate_by(&self.conj)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FramedJson {
    Framed { home: Isometry, conjugator: Isometry },
    Plain(Isometry),
}

/// JSON: a plain isometry, or `{"home": ..., "conjugator": ...}`.
impl Serialize for Framed {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.conj.is_identity(0.0) {
            self.home.serialize(s)
        } else {
            FramedJson::Framed { home: self.home.clone(), conjugator: self.conj.clone() }.serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for Framed {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match FramedJson::deserialize(d)? {
            FramedJson::Plain(g) => Ok(Framed::trivial(&g)),
            FramedJson::Framed { home, conjugator } => {
                if home.model() != conjugator.model() {
                    return Err(serde::de::Error::custom("home and conjugator live in different models"));
                }
                Ok(Framed { home, conj: conjugator })
            }
        }
    }
}

pub fn case2_certificate(g: &Isometry, h: &Isometry, c: &PaperConstants) -> Result<Case2Data> {
    let (search, tube) = search_impl(g, h, c)?;
    let d = (search.j - search.i) as i64;
    let conj = h.pow(d);
    let frame = Framed { home: g.clone(), conj };
    let f = frame.generator()?;
    let mut reports = Vec::new();
    for w in PATH_BATTERY {
        let r = broken_path_framed(&Word::parse(w)?, g, &frame, c)?;
        if !r.passed {
            return Err(Error::DisjointnessUnverified(format!("broken path for {} fails its local checks", r.word)));
        }
        reports.push(r);
    }
    Ok(Case2Data {
        g: g.clone(),
        f,
        h: h.clone(),
        i: search.i,
        j: search.j,
        tau: tube.tau,
        tube_gap: search.tube_gap,
        hull_gap: search.gap,
        required_gap: c.ltg.l,
        word_length: 2 * d as u64 + 1,
        k_bound: search.k_bound,
        broken_path_report: reports,
        frame,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CornerCheck {
    /// `y` on the tube of `g`, `z` on the tube of `f`.
    pub vertex: char,
    pub syllable: String,
    /// Angles at the vertex between the connecting segment and `sigma^{+-1}` of the vertex.
    pub angle_forward: f64,
    pub angle_backward: f64,
    pub segment: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct QiwCheck {
    #[serde(rename = "N")]
    pub n: u32,
    pub measured: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PathReport {
    pub word: String,
    pub syllables: usize,
    /// Length of the connecting segment `yz`.
    pub gap_segment: f64,
    pub hull_gap: f64,
    pub required_gap: f64,
    pub corners: Vec<CornerCheck>,
    pub min_angle: f64,
    pub min_segment: f64,
    pub qiw: Vec<QiwCheck>,
    pub passed: bool,
}

/// Broken-path check for an alternating word in `a = g`, `b = f`.
pub fn broken_path(w: &Word, g: &Isometry, f: &Isometry, c: &PaperConstants) -> Result<PathReport> {
    broken_path_framed(w, g, &Framed::trivial(f), c)
}

fn check_alternating(w: &Word) -> Result<Vec<(usize, i64)>> {
    let syl = w.syllables();
    if !w.is_cyclically_reduced() || syl.len() < 2 || syl.len() % 2 == 1 {
        return Err(Error::NotAlternating);
    }
    Ok(syl)
}

/// Corners are evaluated in the frame where their own tube is computed: `y` next to
/// the tube of `g`, and `z0 = conj^-1 z` next to the tube of `home`. All checks are
/// invariant, so this avoids applying large conjugators to far-away points.
pub fn broken_path_framed(w: &Word, g: &Isometry, frame: &Framed, c: &PaperConstants) -> Result<PathReport> {
    let syllables = check_alternating(w)?;
    let tg = TubeDescriptor::new(g, c.eps)?;
    let th = TubeDescriptor::new(&frame.home, c.eps)?;
    let none = || Error::TauTooLarge { tau: tg.tau.max(th.tau), limit: c.eps / 10.0 };
    let (cg, ch) = (tg.core.clone().ok_or_else(none)?, th.core.clone().ok_or_else(none)?);
    let conj_inv = frame.conj.inverse();

    // frame of g: T(g) and conj T(home)
    let raw = match transported_core_distance(&cg, &ch, &frame.conj) {
        Ok(v) => v,
        Err(Error::SharedFixedPoint) => return Err(Error::HypothesisGapMissing { gap: 0.0, required: c.ltg.l }),
        Err(e) => return Err(e),
    };
    let hull_gap = raw - 2.0 * c.q_hull;
    if !(hull_gap > c.ltg.l) {
        return Err(Error::HypothesisGapMissing { gap: hull_gap, required: c.ltg.l });
    }
    let line_a = closest_line_transported(&cg, &ch, &frame.conj)?;
    let y = exit_from_core(&cg, &line_a, true)?;
    let toward_z = line_a.point_at(line_a.parameter_of(&y) + 1.0);
    // frame of home: T(home) and conj^-1 T(g)
    let line_b = closest_line_transported(&ch, &cg, &conj_inv)?;
    let z0 = exit_from_core(&ch, &line_b, true)?;
    let toward_y = line_b.point_at(line_b.parameter_of(&z0) + 1.0);

    let min_segment = c.eps / 10.0 - TOL_POINT;
    let mut corners = Vec::new();
    for &(gen, m) in &syllables {
        let (vertex, base, other, iso, label) = if gen == 0 {
            ('y', &y, &toward_z, g, 'g')
        } else {
            ('z', &z0, &toward_y, &frame.home, 'f')
        };
        let fwd = iso.pow(m).apply(base);
        let bwd = iso.pow(-m).apply(base);
        let angle_forward = angle(base, other, &fwd)?;
        let angle_backward = angle(base, other, &bwd)?;
        let segment = distance(base, &fwd);
        let passed = angle_forward >= std::f64::consts::FRAC_PI_2 - ANGLE_SLACK
            && angle_backward >= std::f64::consts::FRAC_PI_2 - ANGLE_SLACK
            && segment >= min_segment;
        corners.push(CornerCheck { vertex, syllable: format!("{label}^{m}"), angle_forward, angle_backward, segment, passed });
    }

    let f = frame.generator()?;
    let k = syllables.len() as f64;
    let mut qiw = Vec::new();
    let mut power = Word::empty();
    for n in 1..=QIW_POWERS {
        power = power.concat(w);
        let m = evaluate_word(&power, g, &f)?;
        let measured = m.displacement_robust(&y);
        let bound = k * c.ltg.l / c.ltg.lambda_qg * n as f64 - c.ltg.alpha_qg;
        qiw.push(QiwCheck { n, measured, bound, passed: measured >= bound });
    }

    let min_angle = corners.iter().map(|c| c.angle_forward.min(c.angle_backward)).fold(f64::INFINITY, f64::min);
    let min_seg = corners.iter().map(|c| c.segment).fold(f64::INFINITY, f64::min);
    let passed = corners.iter().all(|c| c.passed) && qiw.iter().all(|q| q.passed);
    Ok(PathReport {
        word: w.render(['g', 'f']),
        syllables: syllables.len(),
        gap_segment: raw,
        hull_gap,
        required_gap: c.ltg.l,
        corners,
        min_angle,
        min_segment: min_seg,
        qiw,
        passed,
    })
}

pub enum OrbitSource<'a> {
    Case1(&'a Case1Data),
    Case2(&'a Case2Data),
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitReport {
    /// `passed`, `failed`, or `skipped-hyperbolic-only`.
    pub status: String,
    pub words: u64,
    pub max_length: usize,
    /// Required growth per letter, `tau(generator) / lambda_qg`.
    pub slope: f64,
    pub alpha: f64,
    pub min_ratio: Option<f64>,
    pub worst_margin: Option<f64>,
    pub worst_word: Option<String>,
}

/// Orbit-growth check over all reduced words of length `1..=n_max` in the two free generators:
/// `d(w p, p) >= (tau / lambda_qg) |w| - alpha_qg`.
pub fn verify_orbit_qi(src: OrbitSource<'_>, n_max: usize, c: &PaperConstants) -> Result<OrbitReport> {
    let (a, b, base, tau) = match src {
        OrbitSource::Case1(d) => {
            // everything in the home frame of g, where x lives
            let (gf, hf) = &d.frames;
            let ni = d.n as i64;
            let h_here = hf.home.pow(ni).conjugate_by(&gf.conj.inverse().compose(&hf.conj)?)?;
            (gf.home.pow(ni), h_here, d.x.clone(), d.n as f64 * d.tau)
        }
        OrbitSource::Case2(d) => {
            let kinds = (d.g.classify()?.kind, d.frame.home.classify()?.kind);
            if kinds != (Kind::Hyperbolic, Kind::Hyperbolic) {
                return Ok(OrbitReport {
                    status: "skipped-hyperbolic-only".into(),
                    words: 0,
                    max_length: n_max,
                    slope: 0.0,
                    alpha: c.ltg.alpha_qg,
                    min_ratio: None,
                    worst_margin: None,
                    worst_word: None,
                });
            }
            let axis = d.g.classify()?.axis.expect("hyperbolic has an axis");
            (d.g.clone(), d.f.clone(), axis.point_at(0.0), d.tau)
        }
    };
    let budget = crate::word::reduced_word_count(n_max);
    if budget > 10_000_000 {
        return Err(Error::DepthTooLarge { depth: n_max, words: budget, budget: 10_000_000 });
    }
    let slope = tau / c.ltg.lambda_qg;
    let gens = [a.clone(), a.inverse(), b.clone(), b.inverse()];
    let mut state = OrbitState { words: 0, min_ratio: f64::INFINITY, worst: (f64::INFINITY, String::new()) };
    let mut stack: Vec<(Isometry, Option<usize>, String)> = vec![(Isometry::identity(a.model()), None, String::new())];
    while let Some((m, last, name)) = stack.pop() {
        if name.len() >= n_max {
            continue;
        }
        for (k, gk) in gens.iter().enumerate() {
            // k ^ 1 is the inverse letter
            if last == Some(k ^ 1) {
                continue;
            }
            let next = m.compose(gk)?;
            let word = format!("{name}{}", ['a', 'A', 'b', 'B'][k]);
            let len = word.len() as f64;
            let d = next.displacement_robust(&base);
            state.words += 1;
            state.min_ratio = state.min_ratio.min(d / len);
            let margin = d - (slope * len - c.ltg.alpha_qg);
            if margin < state.worst.0 {
                state.worst = (margin, word.clone());
            }
            stack.push((next, Some(k), word));
        }
    }
    let passed = state.worst.0 >= 0.0;
    Ok(OrbitReport {
        status: if passed { "passed" } else { "failed" }.into(),
        words: state.words,
        max_length: n_max,
        slope,
        alpha: c.ltg.alpha_qg,
        min_ratio: Some(state.min_ratio),
        worst_margin: Some(state.worst.0),
        worst_word: Some(state.worst.1),
    })
}

struct OrbitState {
    words: u64,
    min_ratio: f64,
    worst: (f64, String),
}
