//! Explicit constants of the construction as functions of `(n, kappa, eps)`.
//!
//! Each scalar has a double-precision evaluator and an arbitrary-precision twin
//! in [`hp`] used for cross-checks and for the `high_precision` block of the
//! constants table.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{TOL_ANGLE, TOL_POINT};
use crate::isometry::{TOL_CLASSIFY, TOL_MATRIX};

/// Hyperbolicity constant `arccosh(sqrt 2)` of a CAT(-1) space.
pub fn delta_hyp() -> f64 {
    std::f64::consts::SQRT_2.acosh()
}

/// `c(D) = 8 pi tanh(D/4) / (1 - tanh^2(D/4))`, which simplifies to `4 pi sinh(D/2)`.
pub fn c_of_d(d: f64) -> f64 {
    4.0 * PI * (d / 2.0).sinh()
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::NonpositiveEps(eps))
    }
}

/// `log((c(1.1 eps) + c(0.2 eps)) * 30 / (7 eps))`.
pub fn r_margulis(eps: f64) -> Result<f64> {
    check_eps(eps)?;
    Ok(((c_of_d(1.1 * eps) + c_of_d(0.2 * eps)) * 30.0 / (7.0 * eps)).ln())
}

/// Solution of `sinh(L1) sinh(eps/100) = 1`.
pub fn l1_of_eps(eps: f64) -> Result<f64> {
    check_eps(eps)?;
    Ok((1.0 / (eps / 100.0).sinh()).asinh())
}

/// The two branches of the Case-1 exponent before the ceiling:
/// `(5 + 2 delta + 3 L1) / (eps/10)` and `27 + 9 (5 + 2 delta) / L1`.
pub fn case1_branches(eps: f64) -> Result<(f64, f64)> {
    let l1 = l1_of_eps(eps)?;
    let d = delta_hyp();
    Ok(((5.0 + 2.0 * d + 3.0 * l1) / (eps / 10.0), 27.0 + 9.0 * (5.0 + 2.0 * d) / l1))
}

pub fn case1_n(eps: f64) -> Result<u64> {
    let (a, b) = case1_branches(eps)?;
    let n = a.max(b).ceil();
    if n >= u64::MAX as f64 {
        return Err(Error::BoundOverflow);
    }
    Ok(n as u64)
}

/// Area of the unit sphere `S^(n-1)` in `R^n`.
pub fn sphere_area(n: u32) -> f64 {
    // A(1) = 2, A(2) = 2 pi, A(k + 2) = 2 pi A(k) / k
    let mut a = if n % 2 == 1 { 2.0 } else { 2.0 * PI };
    let mut k = if n % 2 == 1 { 1 } else { 2 };
    while k < n {
        a *= 2.0 * PI / k as f64;
        k += 2;
    }
    a
}

/// Volume of a ball of radius `r` in `H^n` by adaptive quadrature.
pub fn ball_volume_quadrature(r: f64, n: u32) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let f = |t: f64| t.sinh().powi(n as i32 - 1);
    let rough = quadrature::double_exponential::integrate(f, 0.0, r, 1e-6).integral.abs();
    let tol = (rough * 1e-13).max(f64::MIN_POSITIVE);
    sphere_area(n) * quadrature::double_exponential::integrate(f, 0.0, r, tol).integral
}

/// Volume of a ball of radius `r` in `H^n`: closed forms for `n = 2, 3`.
pub fn ball_volume(r: f64, n: u32) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    match n {
        2 => 4.0 * PI * (r / 2.0).sinh().powi(2),
        3 => {
            let x = 2.0 * r;
            // sinh(x) - x without cancellation for small x
            let s = if x < 1e-2 {
                x.powi(3) / 6.0 + x.powi(5) / 120.0 + x.powi(7) / 5040.0
            } else {
                x.sinh() - x
            };
            PI * s
        }
        _ => ball_volume_quadrature(r, n),
    }
}

/// Local-to-global triple `(L, lambda, alpha)` for broken geodesics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalToGlobal {
    #[serde(rename = "L")]
    pub l: f64,
    pub lambda_qg: f64,
    pub alpha_qg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub point: f64,
    pub angle: f64,
    pub matrix: f64,
    pub classify: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { point: TOL_POINT, angle: TOL_ANGLE, matrix: TOL_MATRIX, classify: TOL_CLASSIFY }
    }
}

/// Configuration bundle; every derived constant is a function of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperConstants {
    pub n: u32,
    pub kappa: f64,
    pub eps: f64,
    pub q_hull: f64,
    pub ltg: LocalToGlobal,
    pub lambda_threshold: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Parameters that came from defaults rather than cited formulas.
    #[serde(default)]
    pub assumed_defaults: Vec<String>,
}

/// Published lower bounds on the Margulis constant for `kappa = 1`.
pub fn margulis_table(n: u32, kappa: f64) -> Option<f64> {
    if kappa != 1.0 {
        return None;
    }
    match n {
        2 => Some(0.2629),
        3 => Some(0.104),
        _ => None,
    }
}

impl Default for PaperConstants {
    fn default() -> Self {
        Self::new(2, 1.0, 0.1).expect("valid defaults")
    }
}

/// Optional overrides, e.g. from a JSON config file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    pub n: Option<u32>,
    pub kappa: Option<f64>,
    pub eps: Option<f64>,
    pub q_hull: Option<f64>,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub lambda_qg: Option<f64>,
    pub alpha_qg: Option<f64>,
}

impl PaperConstants {
    /// Defaults `q_hull = 4 delta`, `L = 20 + 4 delta + eps`, `lambda_qg = 2`, `alpha_qg = 4 delta`.
    pub fn new(n: u32, kappa: f64, eps: f64) -> Result<Self> {
        Self::from_config(&ConstantsConfig { n: Some(n), kappa: Some(kappa), eps: Some(eps), ..Default::default() })
    }

    pub fn from_config(cfg: &ConstantsConfig) -> Result<Self> {
        let n = cfg.n.unwrap_or(2);
        let kappa = cfg.kappa.unwrap_or(1.0);
        let eps = cfg.eps.unwrap_or(0.1);
        let d = delta_hyp();
        let mut flagged = Vec::new();
        let mut pick = |v: Option<f64>, default: f64, name: &str| {
            v.unwrap_or_else(|| {
                flagged.push(name.to_string());
                default
            })
        };
        let q_hull = pick(cfg.q_hull, 4.0 * d, "q_hull");
        let l = pick(cfg.l, 20.0 + 4.0 * d + eps, "L");
        let lambda_qg = pick(cfg.lambda_qg, 2.0, "lambda_qg");
        let alpha_qg = pick(cfg.alpha_qg, 4.0 * d, "alpha_qg");
        let c = Self {
            n,
            kappa,
            eps,
            q_hull,
            ltg: LocalToGlobal { l, lambda_qg, alpha_qg },
            lambda_threshold: eps / 10.0,
            tolerances: Tolerances::default(),
            assumed_defaults: flagged,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        check_eps(self.eps)?;
        if self.n < 2 {
            return Err(Error::Parse(format!("dimension n = {} must be at least 2", self.n)));
        }
        if !(self.kappa >= 1.0) {
            return Err(Error::Parse(format!("pinching kappa = {} must be at least 1", self.kappa)));
        }
        if let Some(bound) = margulis_table(self.n, self.kappa) {
            if self.eps > bound {
                return Err(Error::Parse(format!("eps = {} exceeds the Margulis lower bound {bound} for n = {}", self.eps, self.n)));
            }
        }
        if !(self.q_hull > 0.0) {
            return Err(Error::Parse("q_hull must be positive".into()));
        }
        if !(self.ltg.l > self.eps / 10.0) {
            return Err(Error::NonpositiveL(self.ltg.l));
        }
        if !(self.ltg.lambda_qg >= 1.0) || !(self.ltg.alpha_qg >= 0.0) {
            return Err(Error::Parse("need lambda_qg >= 1 and alpha_qg >= 0".into()));
        }
        if (self.lambda_threshold - self.eps / 10.0).abs() > 1e-15 {
            return Err(Error::Parse("lambda_threshold must equal eps/10".into()));
        }
        Ok(())
    }

    /// `eta_0 = eps / 100`.
    pub fn eta0(&self) -> f64 {
        self.eps / 100.0
    }
}

/// Radii and ratio behind [`k_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KBound {
    pub r1: f64,
    pub r2: f64,
    pub ratio: f64,
    pub k: u64,
}

pub fn k_bound_detail(l: f64, c: &PaperConstants) -> Result<KBound> {
    if !(l > 0.0) {
        return Err(Error::NonpositiveL(l));
    }
    let r1 = c.n as f64 * delta_hyp() + l / 2.0 + c.q_hull;
    let r2 = r1 + r_margulis(c.eps)? + c.eps / 3.0;
    let ratio = ball_volume(c.kappa * r2, c.n) / c.kappa.powi(c.n as i32) / ball_volume(c.eps / 3.0, c.n);
    let k = ratio.ceil() + 1.0;
    if !k.is_finite() || k >= u64::MAX as f64 {
        return Err(Error::BoundOverflow);
    }
    Ok(KBound { r1, r2, ratio, k: k as u64 })
}

/// Ball-packing bound on the number of conjugates searched in Case 2.
pub fn k_bound(l: f64, c: &PaperConstants) -> Result<u64> {
    Ok(k_bound_detail(l, c)?.k)
}

/// Largest `m` with `m tau <= eps/10`.
pub fn m_exponent(tau: f64, eps: f64) -> Result<u64> {
    check_eps(eps)?;
    let limit = eps / 10.0;
    if tau > limit {
        return Err(Error::TauTooLarge { tau, limit });
    }
    if !(tau > 0.0) {
        return Err(Error::WrongKind { expected: "hyperbolic", found: format!("tau = {tau}") });
    }
    let mut m = (limit / tau).floor().max(1.0) as u64;
    while m > 1 && m as f64 * tau > limit {
        m -= 1;
    }
    while (m + 1) as f64 * tau <= limit {
        m += 1;
    }
    Ok(m)
}

/// The full derived table printed by the `constants` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstantsTable {
    pub config: PaperConstants,
    pub delta: f64,
    pub eta0: f64,
    pub c_of_eps: f64,
    pub r_margulis: f64,
    #[serde(rename = "L1")]
    pub l1: f64,
    pub case1_branch_a: f64,
    pub case1_branch_b: f64,
    #[serde(rename = "N_case1")]
    pub n_case1: u64,
    pub k_bound: KBound,
    /// `2 k + 1`, the Case-2 word-length bound in the conjugating pair's letters.
    pub case2_word_length_bound: u64,
    pub ball_volume_eps_over_3: f64,
    pub high_precision: hp::HighPrecisionTable,
}

impl ConstantsTable {
    pub fn compute(c: &PaperConstants) -> Result<Self> {
        let (a, b) = case1_branches(c.eps)?;
        let kb = k_bound_detail(c.ltg.l, c)?;
        Ok(Self {
            config: c.clone(),
            delta: delta_hyp(),
            eta0: c.eta0(),
            c_of_eps: c_of_d(c.eps),
            r_margulis: r_margulis(c.eps)?,
            l1: l1_of_eps(c.eps)?,
            case1_branch_a: a,
            case1_branch_b: b,
            n_case1: case1_n(c.eps)?,
            case2_word_length_bound: kb.k.checked_mul(2).and_then(|x| x.checked_add(1)).ok_or(Error::BoundOverflow)?,
            k_bound: kb,
            ball_volume_eps_over_3: ball_volume(c.eps / 3.0, c.n),
            high_precision: hp::HighPrecisionTable::compute(c.eps, hp::DEFAULT_BITS)?,
        })
    }
}

/// Arbitrary-precision evaluation of the scalar constants.
pub mod hp {
    use astro_float::{BigFloat, Consts, Radix, RoundingMode};
    use serde::{Deserialize, Serialize};

    use crate::error::{Error, Result};

    pub const DEFAULT_BITS: usize = 256;
    const RM: RoundingMode = RoundingMode::ToEven;

    /// Small wrapper binding precision and the constants cache.
    pub struct Ctx {
        p: usize,
        cc: Consts,
    }

    impl Ctx {
        pub fn new(bits: usize) -> Result<Self> {
            let cc = Consts::new().map_err(|e| Error::Parse(format!("arbitrary precision init: {e:?}")))?;
            Ok(Self { p: bits, cc })
        }

        pub fn bits(&self) -> usize {
            self.p
        }

        /// Exact binary value of the double.
        pub fn num(&self, x: f64) -> BigFloat {
            BigFloat::from_f64(x, self.p.max(64))
        }

        /// Decimal literal rounded at working precision (e.g. `"0.1"` is not the double 0.1).
        pub fn lit(&mut self, s: &str) -> BigFloat {
            BigFloat::parse(s, Radix::Dec, self.p, RM, &mut self.cc)
        }

        pub fn pi(&mut self) -> BigFloat {
            self.cc.pi(self.p, RM)
        }

        pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
            a.add(b, self.p, RM)
        }
        pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
            a.sub(b, self.p, RM)
        }
        pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
            a.mul(b, self.p, RM)
        }
        pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
            a.div(b, self.p, RM)
        }
        pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
            a.sqrt(self.p, RM)
        }
        pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
            a.ln(self.p, RM, &mut self.cc)
        }
        pub fn sinh(&mut self, a: &BigFloat) -> BigFloat {
            a.sinh(self.p, RM, &mut self.cc)
        }
        pub fn cosh(&mut self, a: &BigFloat) -> BigFloat {
            a.cosh(self.p, RM, &mut self.cc)
        }
        pub fn asinh(&mut self, a: &BigFloat) -> BigFloat {
            a.asinh(self.p, RM, &mut self.cc)
        }
        pub fn acosh(&mut self, a: &BigFloat) -> BigFloat {
            a.acosh(self.p, RM, &mut self.cc)
        }

        /// Decimal string with all working digits.
        pub fn to_string(&mut self, a: &BigFloat) -> String {
            a.format(Radix::Dec, RM, &mut self.cc).unwrap_or_else(|_| "NaN".into())
        }

        pub fn to_f64(&mut self, a: &BigFloat) -> f64 {
            self.to_string(a).parse().unwrap_or(f64::NAN)
        }
    }

    pub fn delta(ctx: &mut Ctx) -> BigFloat {
        let two = ctx.num(2.0);
        let s = ctx.sqrt(&two);
        ctx.acosh(&s)
    }

    pub fn c_of_d(ctx: &mut Ctx, d: &BigFloat) -> BigFloat {
        let half = ctx.div(d, &ctx.num(2.0));
        let s = ctx.sinh(&half);
        let pi = ctx.pi();
        let four_pi = ctx.mul(&pi, &ctx.num(4.0));
        ctx.mul(&four_pi, &s)
    }

    pub fn r_margulis(ctx: &mut Ctx, eps: &BigFloat) -> BigFloat {
        let (k1, k2) = (ctx.lit("1.1"), ctx.lit("0.2"));
        let a = ctx.mul(eps, &k1);
        let b = ctx.mul(eps, &k2);
        let ca = c_of_d(ctx, &a);
        let cb = c_of_d(ctx, &b);
        let sum = ctx.add(&ca, &cb);
        let den = ctx.mul(eps, &ctx.num(7.0));
        let q = ctx.div(&ctx.mul(&sum, &ctx.num(30.0)), &den);
        ctx.ln(&q)
    }

    pub fn l1(ctx: &mut Ctx, eps: &BigFloat) -> BigFloat {
        let x = ctx.div(eps, &ctx.num(100.0));
        let s = ctx.sinh(&x);
        let inv = ctx.div(&ctx.num(1.0), &s);
        ctx.asinh(&inv)
    }

    pub fn case1_branches(ctx: &mut Ctx, eps: &BigFloat) -> (BigFloat, BigFloat) {
        let d = delta(ctx);
        let l1 = l1(ctx, eps);
        let five_2d = ctx.add(&ctx.num(5.0), &ctx.mul(&d, &ctx.num(2.0)));
        let num_a = ctx.add(&five_2d, &ctx.mul(&l1, &ctx.num(3.0)));
        let a = ctx.div(&num_a, &ctx.div(eps, &ctx.num(10.0)));
        let b = ctx.add(&ctx.num(27.0), &ctx.div(&ctx.mul(&five_2d, &ctx.num(9.0)), &l1));
        (a, b)
    }

    /// Closed-form ball volume for `n = 2, 3`.
    pub fn ball_volume(ctx: &mut Ctx, r: &BigFloat, n: u32) -> Option<BigFloat> {
        let pi = ctx.pi();
        match n {
            2 => {
                let h = ctx.div(r, &ctx.num(2.0));
                let s = ctx.sinh(&h);
                Some(ctx.mul(&ctx.mul(&pi, &ctx.num(4.0)), &ctx.mul(&s, &s)))
            }
            3 => {
                let x = ctx.mul(r, &ctx.num(2.0));
                let s = ctx.sinh(&x);
                Some(ctx.mul(&pi, &ctx.sub(&s, &x)))
            }
            _ => None,
        }
    }

    /// Constants at a decimal `eps`, all as decimal strings.
    #[derive(Debug, Clone, Serialize, Deserialize)]
    pub struct HighPrecisionTable {
        pub bits: usize,
        pub delta: String,
        pub r_margulis: String,
        #[serde(rename = "L1")]
        pub l1: String,
        pub case1_branch_a: String,
        pub case1_branch_b: String,
        #[serde(rename = "N_case1")]
        pub n_case1: u64,
    }

    impl HighPrecisionTable {
        pub fn compute(eps: f64, bits: usize) -> Result<Self> {
            let mut ctx = Ctx::new(bits)?;
            // the shortest decimal that round-trips to eps
            let e = ctx.lit(&format!("{eps:e}"));
            let d = delta(&mut ctx);
            let r = r_margulis(&mut ctx, &e);
            let l = l1(&mut ctx, &e);
            let (a, b) = case1_branches(&mut ctx, &e);
            let af = ctx.to_f64(&a);
            let bf = ctx.to_f64(&b);
            let m = if a.cmp(&b).unwrap_or(0) >= 0 { &a } else { &b };
            let n = ceil_to_u64(&mut ctx, m, af.max(bf))?;
            Ok(Self {
                bits,
                delta: ctx.to_string(&d),
                r_margulis: ctx.to_string(&r),
                l1: ctx.to_string(&l),
                case1_branch_a: ctx.to_string(&a),
                case1_branch_b: ctx.to_string(&b),
                n_case1: n,
            })
        }
    }

    /// Exact ceiling of a big float known to be close to `approx`.
    fn ceil_to_u64(ctx: &mut Ctx, x: &BigFloat, approx: f64) -> Result<u64> {
        if !(approx.is_finite() && approx < 1e18) {
            return Err(Error::BoundOverflow);
        }
        let mut k = approx.floor().max(0.0) as u64;
        // adjust so that k - 1 < x <= k
        while x.cmp(&ctx.num(k as f64)).unwrap_or(0) > 0 {
            k += 1;
        }
        while k > 0 && x.cmp(&ctx.num((k - 1) as f64)).unwrap_or(0) <= 0 {
            k -= 1;
        }
        Ok(k)
    }
}
