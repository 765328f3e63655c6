//! Single-study Bayes factors for the linear model and conversions between
//! test statistics.
//!
//! Every Bayes factor is carried as `2 ln BF` together with its orientation.
//! The g-prior factors are closed-form functions of R², T² or Λ. The JZS
//! factor integrates the noncentral t likelihood against a standard Cauchy
//! prior on the standardized effect.

use std::fmt;

use crate::distributions::{ln_nct_pdf, ln_t_pdf, normal_quantile, t_pdf, t_sf2, DegreesOfFreedom, Noncentrality};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_with_breaks, Tolerance};
use crate::real::Real;

/// Which hypothesis sits in the numerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Orientation {
    /// Evidence for the alternative over the null.
    #[serde(rename = "BF10")]
    Bf10,
    /// Evidence for the null over the alternative.
    #[serde(rename = "BF01")]
    Bf01,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Orientation::Bf10 => Orientation::Bf01,
            Orientation::Bf01 => Orientation::Bf10,
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Bf10 => "BF10",
            Orientation::Bf01 => "BF01",
        })
    }
}

/// A Bayes factor on the `2 ln` scale.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LogBf<T> {
    pub two_log_bf: T,
    pub orientation: Orientation,
}

impl<T: Real> LogBf<T> {
    pub fn bf10(two_log_bf: T) -> Self {
        Self {
            two_log_bf,
            orientation: Orientation::Bf10,
        }
    }

    pub fn bf01(two_log_bf: T) -> Self {
        Self {
            two_log_bf,
            orientation: Orientation::Bf01,
        }
    }

    /// Swaps numerator and denominator.
    pub fn flip(self) -> Self {
        Self {
            two_log_bf: -self.two_log_bf,
            orientation: self.orientation.flipped(),
        }
    }

    /// The same factor expressed in the requested orientation.
    pub fn oriented(self, orientation: Orientation) -> Self {
        if self.orientation == orientation {
            self
        } else {
            self.flip()
        }
    }

    /// `2 ln BF10`, whatever the stored orientation.
    pub fn two_log_bf10(self) -> T {
        self.oriented(Orientation::Bf10).two_log_bf
    }

    pub fn ln_bf(self) -> T {
        T::lit(0.5) * self.two_log_bf
    }

    /// The Bayes factor itself; may overflow to infinity or underflow to zero.
    pub fn bf(self) -> T {
        self.ln_bf().exp()
    }
}

/// Zellner g-prior scale g > 0.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct GPrior<T>(T);

impl<T: Real> GPrior<T> {
    pub fn new(g: T) -> Result<Self> {
        if g > T::zero() && g.is_finite() {
            Ok(Self(g))
        } else {
            Err(Error::domain("g-prior", format!("g = {g} must be positive and finite")))
        }
    }

    /// The unit-information choice g = n.
    pub fn unit_information(n: usize) -> Result<Self> {
        Self::new(T::count(n))
    }

    #[inline]
    pub fn get(self) -> T {
        self.0
    }
}

/// Direction of an effect when only an unsigned statistic was reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Pos,
    #[serde(rename = "-")]
    Neg,
    #[default]
    #[serde(rename = "?")]
    Unknown,
}

impl Sign {
    pub fn of<T: Real>(x: T) -> Self {
        if x > T::zero() {
            Sign::Pos
        } else if x < T::zero() {
            Sign::Neg
        } else {
            Sign::Unknown
        }
    }
}

/// Summary statistics of one two-sample comparison or simple regression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudySummary<T> {
    pub t_stat: Option<T>,
    pub n: usize,
    pub nu: DegreesOfFreedom<T>,
    /// Covariate sum of squares: n₁n₂/(n₁+n₂) for two groups, (n−1)s²ₓ for regression.
    pub ss_x: Option<T>,
    pub sign: Sign,
}

impl<T: Real> StudySummary<T> {
    /// A two-sample t-test with group sizes `n1` and `n2`.
    pub fn two_sample(t_stat: Option<T>, n1: usize, n2: usize) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::domain("study summary", "both groups need at least one observation"));
        }
        let n = n1 + n2;
        let (a, b) = (T::count(n1), T::count(n2));
        Ok(Self {
            t_stat,
            n,
            nu: DegreesOfFreedom::from_sample_size(n)?,
            ss_x: Some(a * b / (a + b)),
            sign: t_stat.map_or(Sign::Unknown, Sign::of),
        })
    }

    /// A simple regression on `n` observations with covariate sum of squares `ss_x`.
    pub fn regression(t_stat: Option<T>, n: usize, ss_x: Option<T>) -> Result<Self> {
        if let Some(ss) = ss_x {
            if !(ss > T::zero()) {
                return Err(Error::domain("study summary", format!("ss_x = {ss} must be positive")));
            }
        }
        Ok(Self {
            t_stat,
            n,
            nu: DegreesOfFreedom::from_sample_size(n)?,
            ss_x,
            sign: t_stat.map_or(Sign::Unknown, Sign::of),
        })
    }
}

fn check_unit_interval<T: Real>(op: &'static str, name: &str, r2: T) -> Result<()> {
    if r2 >= T::zero() && r2 < T::one() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("{name} = {r2} must lie in [0, 1)")))
    }
}

/// g-prior Bayes factor of a p-covariate model against the intercept-only model,
/// from the coefficient of determination.
pub fn gprior_bf10_from_r2<T: Real>(n: usize, p: usize, r2: T, g: GPrior<T>) -> Result<LogBf<T>> {
    const OP: &str = "gprior_bf10_from_r2";
    check_unit_interval(OP, "R²", r2)?;
    if n <= p + 1 {
        return Err(Error::domain(OP, format!("n = {n} must exceed p + 1 = {}", p + 1)));
    }
    let g = g.get();
    let value = T::count(n - p - 1) * g.ln_1p() - T::count(n - 1) * (g * (T::one() - r2)).ln_1p();
    Ok(LogBf::bf10(value))
}

/// g-prior Bayes factor of a q-covariate model M0 nested in a model M1 that adds
/// p covariates of interest, oriented in favour of M0.
pub fn gprior_bf01_nuisance<T: Real>(n: usize, p: usize, q: usize, r2_0: T, r2_1: T, g: GPrior<T>) -> Result<LogBf<T>> {
    const OP: &str = "gprior_bf01_nuisance";
    check_unit_interval(OP, "R²₀", r2_0)?;
    check_unit_interval(OP, "R²₁", r2_1)?;
    if r2_0 > r2_1 {
        return Err(Error::domain(
            OP,
            format!("R²₀ = {r2_0} exceeds R²₁ = {r2_1}; the null model must be nested in the alternative"),
        ));
    }
    if n <= p + q + 1 {
        return Err(Error::domain(OP, format!("n = {n} must exceed p + q + 1 = {}", p + q + 1)));
    }
    let g = g.get();
    let value = -T::count(n - p - 1) * g.ln_1p()
        + T::count(n - q - 1) * (g * (T::one() - r2_1) / (T::one() - r2_0)).ln_1p();
    Ok(LogBf::bf01(value))
}

fn check_sample_size(op: &'static str, n: usize) -> Result<()> {
    if n > 2 {
        Ok(())
    } else {
        Err(Error::domain(op, format!("n = {n} must exceed 2")))
    }
}

/// g-prior Bayes factor of a simple regression (or two-sample comparison) as a
/// function of the squared t statistic with ν = n − 2.
pub fn gprior_bf10_from_t<T: Real>(t2: T, n: usize, g: GPrior<T>) -> Result<LogBf<T>> {
    const OP: &str = "gprior_bf10_from_t";
    check_sample_size(OP, n)?;
    if !(t2 >= T::zero()) {
        return Err(Error::domain(OP, format!("T² = {t2} must be non-negative")));
    }
    let nu = T::count(n - 2);
    let g = g.get();
    let value = nu * g.ln_1p() - T::count(n - 1) * (g / (t2 / nu + T::one())).ln_1p();
    Ok(LogBf::bf10(value))
}

/// Likelihood-ratio statistic to squared t: T² = ν (exp(Λ/n) − 1), ν = n − 2.
pub fn lambda_to_t2<T: Real>(lambda: T, n: usize) -> Result<T> {
    const OP: &str = "lambda_to_t2";
    check_sample_size(OP, n)?;
    if !(lambda >= T::zero()) {
        return Err(Error::domain(OP, format!("Λ = {lambda} must be non-negative")));
    }
    Ok(T::count(n - 2) * (lambda / T::count(n)).exp_m1())
}

/// Inverse of [`lambda_to_t2`]: Λ = n ln(1 + T²/ν).
pub fn t2_to_lambda<T: Real>(t2: T, n: usize) -> Result<T> {
    const OP: &str = "t2_to_lambda";
    check_sample_size(OP, n)?;
    if !(t2 >= T::zero()) {
        return Err(Error::domain(OP, format!("T² = {t2} must be non-negative")));
    }
    Ok(T::count(n) * (t2 / T::count(n - 2)).ln_1p())
}

/// The squared t statistic whose g-prior Bayes factor equals `bf`.
///
/// Attainable values run from the T² = 0 value up to, but excluding, the
/// asymptote (n − 2) ln(1 + g).
pub fn bf_to_t2<T: Real>(bf: LogBf<T>, n: usize, g: GPrior<T>) -> Result<T> {
    const OP: &str = "bf_to_t2";
    check_sample_size(OP, n)?;
    let target = bf.two_log_bf10();
    let floor = gprior_bf10_from_t(T::zero(), n, g)?.two_log_bf;
    let nu = T::count(n - 2);
    let ceiling = nu * g.get().ln_1p();
    let slack = T::lit(64.0) * T::epsilon() * floor.abs().max(T::one());
    if !(target >= floor - slack) || !(target < ceiling) || !target.is_finite() {
        return Err(Error::OutOfRange {
            op: OP,
            detail: format!("2 ln BF10 = {target} is outside [{floor}, {ceiling}) for n = {n}, g = {}", g.get()),
        });
    }
    // ln(1 + g/s) = (ceiling − target)/(n − 1) with s = T²/ν + 1.
    let excess = ((ceiling - target) / T::count(n - 1)).exp_m1();
    let t2 = nu * (g.get() / excess - T::one());
    Ok(t2.max(T::zero()))
}

/// Squared t statistic with two-sided p-value `p` on ν degrees of freedom.
pub fn p_to_t2<T: Real>(p: T, nu: DegreesOfFreedom<T>) -> Result<T> {
    const OP: &str = "p_to_t2";
    if !(p > T::zero() && p <= T::one()) {
        return Err(Error::domain(OP, format!("p = {p} must lie in (0, 1]")));
    }
    if p == T::one() {
        return Ok(T::zero());
    }
    let ln_p = p.ln();
    // Residual ln P(|T| ≥ t) − ln p, decreasing in t.
    let residual = |t: T| -> Result<T> { Ok(t_sf2(t * t, nu)?.ln() - ln_p) };

    let mut lo = T::zero();
    let mut hi = T::one();
    let mut expansions = 0;
    while residual(hi)? > T::zero() {
        lo = hi;
        hi = hi * T::lit(2.0);
        expansions += 1;
        if expansions > 1100 || !hi.is_finite() {
            return Err(Error::OutOfRange {
                op: OP,
                detail: format!("no finite t statistic has p = {p} on {} degrees of freedom", nu.get()),
            });
        }
    }
    let guess = -normal_quantile(T::lit(0.5) * p)?;
    let mut t = if guess > lo && guess < hi { guess } else { T::lit(0.5) * (lo + hi) };
    let tiny = T::lit(4.0) * T::epsilon();
    for _ in 0..200 {
        let r = residual(t)?;
        if r == T::zero() {
            return Ok(t * t);
        }
        if r > T::zero() {
            lo = t;
        } else {
            hi = t;
        }
        // d/dt ln P(|T| ≥ t) = −2 f(t) / P(|T| ≥ t)
        let tail = t_sf2(t * t, nu)?;
        let slope = -T::lit(2.0) * t_pdf(t, nu) / tail;
        let newton = t - r / slope;
        let next = if newton > lo && newton < hi && newton.is_finite() {
            newton
        } else {
            T::lit(0.5) * (lo + hi)
        };
        if (next - t).abs() <= tiny * t || hi - lo <= tiny * hi {
            return Ok(next * next);
        }
        t = next;
    }
    Ok(t * t)
}

/// Quadrature settings for Cauchy-prior integrals.
pub(crate) fn jzs_tolerance<T: Real>() -> Tolerance<T> {
    let rel = 1e-8_f64.max(1000.0 * T::epsilon().as_f64());
    Tolerance::new(1e-12, rel, 1 << 15)
}

/// One study's contribution to a JZS likelihood: |T|, ν and ss_x.
#[derive(Debug, Clone, Copy)]
pub(crate) struct JzsTerm<T> {
    pub t: T,
    pub nu: DegreesOfFreedom<T>,
    pub sqrt_ss: T,
}

/// ln ∫ Π_k f_ν_k(T_k; √ss_k β) c(β) dβ with c the standard Cauchy density.
///
/// After β = tan θ the prior becomes the uniform density 1/π on (−π/2, π/2).
/// Break points bracket the likelihood peak so a narrow peak is never missed,
/// and the integrand is scaled by its largest sampled value before exponentiation.
pub(crate) fn jzs_ln_marginal<T: Real>(terms: &[JzsTerm<T>]) -> Result<T> {
    if terms.is_empty() {
        return Err(Error::domain("jzs", "at least one study is required"));
    }
    let ln_lik = |beta: T| -> T {
        let mut acc = T::zero();
        for term in terms {
            let delta = term.sqrt_ss * beta;
            if !delta.is_finite() {
                return T::neg_infinity();
            }
            acc = acc + ln_nct_pdf(term.t, term.nu, Noncentrality::new(delta).expect("finite noncentrality"));
        }
        acc
    };

    let (num, den) = terms.iter().fold((T::zero(), T::zero()), |(a, b), term| {
        (a + term.t * term.sqrt_ss, b + term.sqrt_ss * term.sqrt_ss)
    });
    let centre = num / den;
    let width = den.sqrt().recip();
    let half_pi = T::FRAC_PI_2();
    let mut breaks = vec![-half_pi, half_pi, T::zero()];
    for c in [-16.0, -8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 16.0] {
        breaks.push((centre + T::lit(c) * width).atan());
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite break points"));
    breaks.dedup();

    let scale = breaks[1..breaks.len() - 1]
        .iter()
        .map(|&theta| ln_lik(theta.tan()))
        .fold(T::neg_infinity(), T::max);
    if !scale.is_finite() {
        return Err(Error::domain("jzs", "likelihood vanishes at every break point"));
    }
    let integrand = |theta: T| -> T {
        let v = ln_lik(theta.tan());
        if v == T::neg_infinity() {
            T::zero()
        } else {
            (v - scale).exp()
        }
    };
    let integral = integrate_with_breaks(integrand, &breaks, jzs_tolerance())?;
    Ok(scale + (integral.value / T::PI()).ln())
}

/// JZS Bayes factor of a single t statistic under a standard Cauchy prior on
/// the standardized effect, with ν degrees of freedom and covariate sum of squares `ss_x`.
pub fn jzs_bf10<T: Real>(t_stat: T, nu: DegreesOfFreedom<T>, ss_x: T) -> Result<LogBf<T>> {
    if !(ss_x > T::zero() && ss_x.is_finite()) {
        return Err(Error::domain("jzs_bf10", format!("ss_x = {ss_x} must be positive and finite")));
    }
    if !t_stat.is_finite() {
        return Err(Error::domain("jzs_bf10", format!("t = {t_stat} must be finite")));
    }
    let t = t_stat.abs();
    let term = JzsTerm {
        t,
        nu,
        sqrt_ss: ss_x.sqrt(),
    };
    let ln_num = jzs_ln_marginal(&[term])?;
    Ok(LogBf::bf10(T::lit(2.0) * (ln_num - ln_t_pdf(t, nu))))
}
