//! End-to-end freeness certificates and the brute-force relation oracle.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{case1_n, k_bound, PaperConstants};
use crate::error::{Error, Result};
use crate::exact::ExactMatrix;
use crate::geometry::IdealPoint;
use crate::isometry::{Isometry, Kind, Model};
use crate::pingpong::{
    case1_certificate_framed, case2_certificate, verify_orbit_qi, Case1Data, Case2Data, Framed, InclusionCheck, OrbitReport, OrbitSource,
    PathReport, WallCheck, TOL_TAU_EQUAL,
};
use crate::word::{Letter, Word};

/// Largest number of words of the top length the oracle will enumerate.
pub const ORACLE_BUDGET: u128 = 10_000_000;
/// Operator-norm distance to `+-I` counted as a relation for floating inputs.
pub const ORACLE_FLOAT_THRESHOLD: f64 = 1e-6;
pub const DEFAULT_DEPTH_EXACT: usize = 12;
pub const DEFAULT_DEPTH_FLOAT: usize = 8;
/// Fixed points closer than this are identified; between this and `FIXED_POINT_LOOSE` the check is inconclusive.
const FIXED_POINT_TIGHT: f64 = 1e-9;
const FIXED_POINT_LOOSE: f64 = 1e-6;
/// Longest words enumerated sequentially before the oracle splits work by prefix.
const PREFIX_LEN: usize = 3;

/// `(f, g f g^-1)`; the second entry has the translation length and type of `f`.
pub fn reduce_to_equal_lengths(f: &Isometry, g: &Isometry) -> Result<(Isometry, Isometry)> {
    for x in [f, g] {
        if x.classify()?.kind == Kind::Elliptic {
            return Err(Error::EllipticInput);
        }
    }
    Ok((f.clone(), f.conjugate_by(g)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Nonelementary {
    Ok,
    SharedFixedPoint,
    SharedAxis,
    Inconclusive,
}

impl Nonelementary {
    pub fn tag(self) -> &'static str {
        match self {
            Nonelementary::Ok => "ok",
            Nonelementary::SharedFixedPoint => "shared-fixed-point",
            Nonelementary::SharedAxis => "shared-axis",
            Nonelementary::Inconclusive => "inconclusive",
        }
    }
}

/// Fixed ideal points of `conj * home * conj^-1`, classified where `home` lives.
fn framed_fixed_points(x: &Framed) -> Result<(Kind, Vec<IdealPoint>)> {
    let class = x.home.classify()?;
    Ok((class.kind, class.fixed_ideal.iter().map(|p| x.conj.apply_ideal(p)).collect()))
}

pub fn check_nonelementary(f: &Isometry, g: &Isometry) -> Nonelementary {
    check_nonelementary_framed(&Framed::trivial(f), &Framed::trivial(g))
}

/// Heuristic: compares fixed points at infinity. Discrete groups with no common fixed
/// point and no common axis are nonelementary once both generators are non-elliptic.
pub fn check_nonelementary_framed(f: &Framed, g: &Framed) -> Nonelementary {
    let (Ok((_, pf)), Ok((_, pg))) = (framed_fixed_points(f), framed_fixed_points(g)) else {
        return Nonelementary::Inconclusive;
    };
    let dist = |a: &IdealPoint| pg.iter().map(|b| a.chordal(b)).fold(f64::INFINITY, f64::min);
    let near: Vec<f64> = pf.iter().map(dist).collect();
    let shared = near.iter().filter(|&&d| d < FIXED_POINT_TIGHT).count();
    if near.iter().any(|&d| (FIXED_POINT_TIGHT..FIXED_POINT_LOOSE).contains(&d)) {
        return Nonelementary::Inconclusive;
    }
    match shared {
        0 => Nonelementary::Ok,
        2 if pg.len() == 2 => Nonelementary::SharedAxis,
        _ => Nonelementary::SharedFixedPoint,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum OracleOutcome {
    NoRelation,
    Relation { word: Word },
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub depth: usize,
    pub words_checked: u128,
    /// Exact rational arithmetic, or floating point with `ORACLE_FLOAT_THRESHOLD`.
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    #[serde(flatten)]
    pub outcome: OracleOutcome,
}

trait GroupElement: Clone + Send + Sync {
    fn mul(&self, rhs: &Self) -> Self;
    fn is_trivial(&self) -> bool;
}

#[derive(Clone)]
struct ExactElem {
    m: ExactMatrix,
    projective: bool,
}

impl GroupElement for ExactElem {
    fn mul(&self, rhs: &Self) -> Self {
        Self { m: self.m.mul(&rhs.m).reduced(), projective: self.projective }
    }

    fn is_trivial(&self) -> bool {
        self.m.is_scalar_identity(1) || (self.projective && self.m.is_scalar_identity(-1))
    }
}

#[derive(Clone)]
struct Sl2Elem(Matrix2<Complex64>);

impl GroupElement for Sl2Elem {
    fn mul(&self, rhs: &Self) -> Self {
        Sl2Elem(self.0 * rhs.0)
    }

    fn is_trivial(&self) -> bool {
        let id = Matrix2::<Complex64>::identity();
        [self.0 - id, self.0 + id].iter().any(|d| {
            let fro2 = d.iter().map(|z| z.norm_sqr()).sum::<f64>();
            let det = (d[(0, 0)] * d[(1, 1)] - d[(0, 1)] * d[(1, 0)]).norm();
            // largest singular value of a 2x2 matrix
            let op = ((fro2 + (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt()) / 2.0).sqrt();
            op < ORACLE_FLOAT_THRESHOLD
        })
    }
}

#[derive(Clone)]
struct LorentzElem(DMatrix<f64>);

impl GroupElement for LorentzElem {
    fn mul(&self, rhs: &Self) -> Self {
        LorentzElem(&self.0 * &rhs.0)
    }

    fn is_trivial(&self) -> bool {
        let n = self.0.nrows();
        let d = &self.0 - DMatrix::<f64>::identity(n, n);
        // the Frobenius norm bounds the operator norm within a factor sqrt(n)
        let fro = d.norm();
        if fro >= ORACLE_FLOAT_THRESHOLD * (n as f64).sqrt() {
            return false;
        }
        fro < ORACLE_FLOAT_THRESHOLD || d.singular_values().max() < ORACLE_FLOAT_THRESHOLD
    }
}

fn letter_index(l: Letter) -> usize {
    match l {
        Letter::A => 0,
        Letter::AInv => 1,
        Letter::B => 2,
        Letter::BInv => 3,
    }
}

/// Shortest, then lexicographically least, relation below `prefix`.
fn search_subtree<E: GroupElement>(gens: &[E; 4], value: &E, word: &mut Vec<Letter>, depth: usize, best: &mut Option<Vec<Letter>>) {
    if word.len() >= depth || best.as_ref().is_some_and(|b| b.len() <= word.len()) {
        return;
    }
    let last = word.last().copied();
    for l in Letter::ALL {
        if last == Some(l.inverse()) {
            continue;
        }
        let next = value.mul(&gens[letter_index(l)]);
        word.push(l);
        if next.is_trivial() {
            if best.as_ref().map_or(true, |b| (word.len(), &word[..]) < (b.len(), &b[..])) {
                *best = Some(word.clone());
            }
        } else {
            search_subtree(gens, &next, word, depth, best);
        }
        word.pop();
    }
}

fn count_words(depth: usize) -> u128 {
    (1..=depth).map(crate::word::reduced_word_count).sum()
}

fn run_oracle<E: GroupElement>(gens: [E; 4], identity: E, depth: usize) -> Option<Word> {
    // sequential breadth-first pass over short words, then one task per prefix
    let mut layer: Vec<(Vec<Letter>, E)> = vec![(Vec::new(), identity)];
    for len in 1..=depth.min(PREFIX_LEN) {
        let mut next = Vec::new();
        for (w, v) in &layer {
            for l in Letter::ALL {
                if w.last() == Some(&l.inverse()) {
                    continue;
                }
                let value = v.mul(&gens[letter_index(l)]);
                let mut word = w.clone();
                word.push(l);
                if value.is_trivial() {
                    // layers are in lexicographic order, so the first hit is the least
                    return Some(Word::from_letters(word).expect("reduced by construction"));
                }
                next.push((word, value));
            }
        }
        layer = next;
        if len == depth {
            return None;
        }
    }
    let found: Vec<Vec<Letter>> = layer
        .par_iter()
        .filter_map(|(w, v)| {
            let mut word = w.clone();
            let mut best = None;
            search_subtree(&gens, v, &mut word, depth, &mut best);
            best
        })
        .collect();
    found
        .into_iter()
        .min_by(|a, b| (a.len(), a).cmp(&(b.len(), b)))
        .map(|w| Word::from_letters(w).expect("reduced by construction"))
}

pub fn default_oracle_depth(a: &Isometry, b: &Isometry) -> usize {
    if a.is_exact() && b.is_exact() {
        DEFAULT_DEPTH_EXACT
    } else {
        DEFAULT_DEPTH_FLOAT
    }
}

/// Enumerates every reduced word of length `1..=depth` in `a`, `b` and reports the
/// shortest (then lexicographically least, in the order `a < A < b < B`) word that
/// evaluates to the identity, `+-I` counting as the identity for 2x2 models.
pub fn oracle_free_up_to(a: &Isometry, b: &Isometry, depth: usize) -> Result<OracleReport> {
    oracle_with_budget(a, b, depth, ORACLE_BUDGET)
}

pub fn oracle_with_budget(a: &Isometry, b: &Isometry, depth: usize, budget: u128) -> Result<OracleReport> {
    if depth == 0 {
        return Err(Error::Parse("oracle depth must be at least 1".into()));
    }
    if a.model() != b.model() {
        return Err(Error::ModelMismatch(a.model().tag().into(), b.model().tag().into()));
    }
    let top = crate::word::reduced_word_count(depth);
    if top > budget {
        return Err(Error::DepthTooLarge { depth, words: top, budget });
    }
    let (ai, bi) = (a.inverse(), b.inverse());
    let sl2 = !matches!(a.model(), Model::Hyperboloid(_));
    let exact = a.is_exact() && b.is_exact();
    let relation = if exact {
        let wrap = |x: &Isometry| ExactElem { m: x.exact().expect("exact").clone(), projective: sl2 };
        let dim = a.exact().expect("exact").dim();
        run_oracle([wrap(a), wrap(&ai), wrap(b), wrap(&bi)], ExactElem { m: ExactMatrix::identity(dim), projective: sl2 }, depth)
    } else if sl2 {
        let wrap = |x: &Isometry| {
            let m = x.complex_entries().expect("2x2 model");
            Sl2Elem(Matrix2::new(m[0], m[1], m[2], m[3]))
        };
        run_oracle([wrap(a), wrap(&ai), wrap(b), wrap(&bi)], Sl2Elem(Matrix2::identity()), depth)
    } else {
        let wrap = |x: &Isometry| LorentzElem(x.lorentz_matrix().clone());
        let n = a.lorentz_matrix().nrows();
        run_oracle([wrap(a), wrap(&ai), wrap(b), wrap(&bi)], LorentzElem(DMatrix::identity(n, n)), depth)
    };
    let outcome = match relation {
        Some(word) => OracleOutcome::Relation { word },
        None => OracleOutcome::NoRelation,
    };
    Ok(OracleReport {
        depth,
        words_checked: count_words(depth),
        exact,
        warning: (!exact).then(|| format!("floating-point identity test (operator-norm distance < {ORACLE_FLOAT_THRESHOLD:e})")),
        outcome,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateStatus {
    Verified,
    OracleFailed,
    UnverifiedPrecondition,
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchBounds {
    /// Uniform exponent for long translations.
    pub case1_n: u64,
    /// `2 k + 1` for short translations, counted in `f` and the (possibly reduced) second generator.
    pub case2_word_length: u64,
    /// The larger of the two.
    pub total: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Preconditions {
    /// Never checked; recorded as an assumption.
    pub discreteness: &'static str,
    pub nonelementary: &'static str,
    /// `skipped-equal-lengths` or `conjugated`: whether `g` was replaced by `g f g^-1`.
    pub reduction: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Case1Summary {
    pub tau: f64,
    pub axis_distance: f64,
    pub l_alpha: f64,
    pub l_beta: f64,
    pub n_direct: u64,
    pub n_paper: u64,
    pub disjointness: Vec<WallCheck>,
    pub inclusions: Vec<InclusionCheck>,
    pub orbit: OrbitReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct Case2Summary {
    pub tau: f64,
    pub i: u64,
    pub j: u64,
    pub tube_gap: f64,
    pub hull_gap: f64,
    pub required_gap: f64,
    pub k_bound: u64,
    pub broken_path_report: Vec<PathReport>,
    pub orbit: OrbitReport,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum CaseDetails {
    Case1(Case1Summary),
    Case2(Case2Summary),
}

#[derive(Debug, Clone, Serialize)]
pub struct FreenessCertificate {
    pub case: u8,
    pub f_word: Word,
    /// Over the input letters `f`, `g` (upper case for inverses).
    pub h_word: String,
    pub h_word_length: usize,
    #[serde(rename = "N")]
    pub n: u64,
    pub word_length_bound: u64,
    pub branch_bounds: BranchBounds,
    pub constants_used: PaperConstants,
    pub margins: BTreeMap<String, f64>,
    pub oracle_depth: usize,
    pub oracle: OracleReport,
    pub status: CertificateStatus,
    pub preconditions: Preconditions,
    pub inputs: BTreeMap<String, Framed>,
    pub details: CaseDetails,
}

impl FreenessCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

#[derive(Debug, Clone, Default)]
pub struct CertifyOptions {
    /// Overrides the model-dependent default depth.
    pub oracle_depth: Option<usize>,
    /// Longest words in the orbit-growth check (default 6).
    pub orbit_depth: Option<usize>,
}

pub fn certify_free(f: &Isometry, g: &Isometry, c: &PaperConstants) -> Result<FreenessCertificate> {
    certify_free_framed(&Framed::trivial(f), &Framed::trivial(g), c, &CertifyOptions::default())
}

/// Free subgroup `<f^N, h>` of `<f, g>`.
///
/// With `tau(f) >= lambda` the long-translation construction runs on `f` and `g'`,
/// with `h = g'^N`; below it the conjugate search runs with `g'` as conjugator and
/// `N = 1`. Here `g' = g f g^-1`, or `g` itself when the translation lengths already
/// agree. The certificate is only returned after the relation oracle has run on `f^N, h`.
pub fn certify_free_framed(f: &Framed, g: &Framed, c: &PaperConstants, opts: &CertifyOptions) -> Result<FreenessCertificate> {
    c.validate()?;
    let (cf, cg) = (f.home.classify()?, g.home.classify()?);
    if cf.kind == Kind::Elliptic || cg.kind == Kind::Elliptic {
        return Err(Error::EllipticInput);
    }
    let nonelementary = check_nonelementary_framed(f, g);
    if matches!(nonelementary, Nonelementary::SharedAxis | Nonelementary::SharedFixedPoint) {
        return Err(Error::Elementary(nonelementary.tag().into()));
    }
    let equal = cf.kind == cg.kind && (cf.tau - cg.tau).abs() <= TOL_TAU_EQUAL * cf.tau.max(1.0);
    let (g_prime, g_word) = if equal {
        (g.clone(), Word::parse("b")?)
    } else {
        (Framed { home: f.home.clone(), conj: g.generator()?.compose(&f.conj)? }, Word::parse("baB")?)
    };
    let tau = cf.tau;
    let kb = k_bound(c.ltg.l, c)?;
    let n_paper = case1_n(c.eps)?;
    let reduction_extra = if equal { 0 } else { 2 };
    let branch_bounds = BranchBounds {
        case1_n: n_paper,
        case2_word_length: 2 * kb + 1,
        total: n_paper.max(2 * kb + 1),
    };
    let orbit_depth = opts.orbit_depth.unwrap_or(6);
    let mut margins = BTreeMap::new();

    let (case, n, h_gen, h_word, word_length_bound, details) = if tau >= c.lambda_threshold {
        let d: Case1Data = case1_certificate_framed(f, &g_prime, c)?;
        let n = d.n;
        let orbit = verify_orbit_qi(OrbitSource::Case1(&d), orbit_depth, c)?;
        margins.insert("wall_gap_min".into(), d.disjointness.iter().map(|w| w.exact_gap).fold(f64::INFINITY, f64::min));
        margins.insert("wall_sampled_margin_min".into(), d.disjointness.iter().map(|w| w.sampled_margin).fold(f64::INFINITY, f64::min));
        margins.insert("inclusion_depth_min".into(), d.inclusions.iter().map(|i| i.worst_depth).fold(f64::INFINITY, f64::min));
        margins.insert("n_tau_minus_required".into(), n as f64 * d.tau - (d.projection.l_alpha + 5.0 + 2.0 * crate::constants::delta_hyp()));
        if let Some(m) = orbit.worst_margin {
            margins.insert("orbit_growth_margin".into(), m);
        }
        let h_gen = g_prime.home.pow(n as i64).conjugate_by(&g_prime.conj)?;
        // g'^N over {f, g}
        let h_word = Word::reduce(g_word.letters().iter().copied().cycle().take(g_word.len() * n as usize));
        let details = CaseDetails::Case1(Case1Summary {
            tau: d.tau,
            axis_distance: d.axis_distance,
            l_alpha: d.projection.l_alpha,
            l_beta: d.projection.l_beta,
            n_direct: d.n_direct,
            n_paper: d.n_paper,
            disjointness: d.disjointness,
            inclusions: d.inclusions,
            orbit,
        });
        (1u8, n, h_gen, h_word, n_paper + reduction_extra, details)
    } else {
        let d: Case2Data = case2_certificate(&f.generator()?, &g_prime.generator()?, c)?;
        let orbit = verify_orbit_qi(OrbitSource::Case2(&d), orbit_depth.min(4), c)?;
        margins.insert("hull_gap_minus_L".into(), d.hull_gap - d.required_gap);
        let angle = d.broken_path_report.iter().map(|r| r.min_angle).fold(f64::INFINITY, f64::min);
        margins.insert("corner_angle_minus_right".into(), angle - std::f64::consts::FRAC_PI_2);
        margins.insert("segment_min".into(), d.broken_path_report.iter().map(|r| r.min_segment).fold(f64::INFINITY, f64::min));
        let qiw = d.broken_path_report.iter().flat_map(|r| r.qiw.iter().map(|q| q.measured - q.bound)).fold(f64::INFINITY, f64::min);
        margins.insert("qiw_margin_min".into(), qiw);
        if let Some(m) = orbit.worst_margin {
            margins.insert("orbit_growth_margin".into(), m);
        }
        let dd = (d.j - d.i) as i64;
        // g'^d f g'^-d over {f, g}
        let conj_d = Word::reduce(g_word.letters().iter().copied().cycle().take(g_word.len() * dd as usize));
        let h_word = conj_d.concat(&Word::power(0, 1)).concat(&conj_d.inverse());
        let details = CaseDetails::Case2(Case2Summary {
            tau: d.tau,
            i: d.i,
            j: d.j,
            tube_gap: d.tube_gap,
            hull_gap: d.hull_gap,
            required_gap: d.required_gap,
            k_bound: d.k_bound,
            broken_path_report: d.broken_path_report,
            orbit,
        });
        (2u8, 1u64, d.f.clone(), h_word, 2 * kb + 1 + 2 * reduction_extra, details)
    };

    let f_n = f.home.pow(n as i64).conjugate_by(&f.conj)?;
    let depth = opts.oracle_depth.unwrap_or_else(|| default_oracle_depth(&f_n, &h_gen));
    let oracle = oracle_free_up_to(&f_n, &h_gen, depth)?;
    let orbit_ok = match &details {
        CaseDetails::Case1(s) => s.orbit.status != "failed",
        CaseDetails::Case2(s) => s.orbit.status != "failed",
    };
    let status = match (&oracle.outcome, nonelementary) {
        (OracleOutcome::Relation { .. }, _) => CertificateStatus::OracleFailed,
        (_, Nonelementary::Inconclusive) => CertificateStatus::UnverifiedPrecondition,
        _ if !orbit_ok || n > n_paper => CertificateStatus::UnverifiedPrecondition,
        _ => CertificateStatus::Verified,
    };
    let mut inputs = BTreeMap::new();
    inputs.insert("f".to_string(), f.clone());
    inputs.insert("g".to_string(), g.clone());
    let cert = FreenessCertificate {
        case,
        f_word: Word::power(0, n as i64),
        h_word: h_word.render(['f', 'g']),
        h_word_length: h_word.len(),
        n,
        word_length_bound,
        branch_bounds,
        constants_used: c.clone(),
        margins,
        oracle_depth: depth,
        oracle,
        status,
        preconditions: Preconditions {
            discreteness: "assumed",
            nonelementary: nonelementary.tag(),
            reduction: if equal { "skipped-equal-lengths" } else { "conjugated" },
        },
        inputs,
        details,
    };
    if let OracleOutcome::Relation { word } = &cert.oracle.outcome {
        return Err(Error::OracleRefuted { relation: word.to_string(), certificate: cert.to_json() });
    }
    Ok(cert)
}

/// Outcome of re-deriving a certificate from its own recorded inputs.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub consistent: bool,
    pub status: CertificateStatus,
    pub case: u8,
    pub h_word_length: usize,
    /// Top-level fields whose recomputed value differs from the recorded one.
    pub mismatches: Vec<String>,
}

fn field<'a>(cert: &'a serde_json::Value, key: &str) -> Result<&'a serde_json::Value> {
    cert.get(key).ok_or_else(|| Error::Parse(format!("certificate lacks {key:?}")))
}

fn parse_field<T: serde::de::DeserializeOwned>(cert: &serde_json::Value, key: &str) -> Result<T> {
    serde_json::from_value(field(cert, key)?.clone()).map_err(|e| Error::Parse(format!("{key}: {e}")))
}

/// Re-runs the certifier on the recorded inputs, constants and depths and compares
/// every top-level field. Recorded word lengths and bounds are also checked against
/// the recorded words.
pub fn verify_certificate(cert: &serde_json::Value) -> Result<VerifyReport> {
    let inputs: BTreeMap<String, Framed> = parse_field(cert, "inputs")?;
    let (f, g) = match (inputs.get("f"), inputs.get("g")) {
        (Some(f), Some(g)) => (f, g),
        _ => return Err(Error::Parse("inputs need both f and g".into())),
    };
    let c: PaperConstants = parse_field(cert, "constants_used")?;
    let oracle_depth: usize = parse_field(cert, "oracle_depth")?;
    let orbit_depth: Option<usize> =
        field(cert, "details")?.pointer("/orbit/max_length").and_then(|v| v.as_u64()).map(|v| v as usize);
    let opts = CertifyOptions { oracle_depth: Some(oracle_depth), orbit_depth };
    let fresh = certify_free_framed(f, g, &c, &opts)?;
    let fresh_json = serde_json::to_value(&fresh).map_err(|e| Error::Parse(e.to_string()))?;

    let recorded = cert.as_object().ok_or_else(|| Error::Parse("certificate must be an object".into()))?;
    let mut mismatches: Vec<String> = fresh_json
        .as_object()
        .expect("certificate serializes to an object")
        .iter()
        .filter(|(k, v)| recorded.get(k.as_str()) != Some(v))
        .map(|(k, _)| k.clone())
        .collect();
    let word: String = parse_field(cert, "h_word")?;
    let len: usize = parse_field(cert, "h_word_length")?;
    let bound: u64 = parse_field(cert, "word_length_bound")?;
    if word.chars().count() != len || len as u64 > bound {
        mismatches.push("h_word_length".into());
    }
    mismatches.sort();
    mismatches.dedup();
    Ok(VerifyReport {
        consistent: mismatches.is_empty(),
        status: fresh.status,
        case: fresh.case,
        h_word_length: fresh.h_word_length,
        mismatches,
    })
}
