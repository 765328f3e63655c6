//! Student t (central and noncentral), normal and chi-square distribution functions.
//!
//! The noncentral t density is evaluated through the representation
//!
//! ```text
//! f(t; ν, δ) = f(t; ν, 0) · exp(−δ²/2) · Σ_j (√2 μ)^j / j! · Γ((ν + j + 1)/2) / Γ((ν + 1)/2),
//! μ = δ t / √(ν + t²),
//! ```
//!
//! summed in log space when μ ≥ 0 (all terms positive). For μ < 0 the same
//! quantity is the ratio of two Hermite-type integrals ∫₀^∞ x^ν exp(−(x − μ)²/2) dx,
//! which is log-concave in x and integrated adaptively around its mode.

use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};
use crate::real::Real;
use crate::special::{beta_reg, gamma_q, ln_gamma_half_ratio, ln_gamma_unchecked};

/// Degrees of freedom ν > 0.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DegreesOfFreedom<T>(T);

impl<T: Real> DegreesOfFreedom<T> {
    pub fn new(nu: T) -> Result<Self> {
        if nu > T::zero() && !nu.is_nan() {
            Ok(Self(nu))
        } else {
            Err(Error::domain("degrees of freedom", format!("nu = {nu} must be positive")))
        }
    }

    /// ν = n − 2, the two-sample / simple-regression convention.
    pub fn from_sample_size(n: usize) -> Result<Self> {
        if n <= 2 {
            return Err(Error::domain("degrees of freedom", format!("n = {n} leaves no residual degrees of freedom")));
        }
        Self::new(T::count(n - 2))
    }

    #[inline]
    pub fn get(self) -> T {
        self.0
    }
}

/// Noncentrality δ of a t statistic; any finite real.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Noncentrality<T>(T);

impl<T: Real> Noncentrality<T> {
    pub fn new(delta: T) -> Result<Self> {
        if delta.is_finite() {
            Ok(Self(delta))
        } else {
            Err(Error::domain("noncentrality", format!("delta = {delta} must be finite")))
        }
    }

    #[inline]
    pub fn get(self) -> T {
        self.0
    }
}

/// ln of the central Student-t density.
pub fn ln_t_pdf<T: Real>(t: T, nu: DegreesOfFreedom<T>) -> T {
    let nu = nu.get();
    let half = T::lit(0.5);
    ln_gamma_half_ratio(half * nu) - half * (nu * T::PI()).ln() - half * (nu + T::one()) * (t * t / nu).ln_1p()
}

pub fn t_pdf<T: Real>(t: T, nu: DegreesOfFreedom<T>) -> T {
    ln_t_pdf(t, nu).exp()
}

/// Largest series peak index before switching to quadrature.
const SERIES_PEAK_LIMIT: f64 = 4000.0;
/// Terms this far (in log units) below the running sum are dropped.
const SERIES_CUTOFF: f64 = 42.0;

/// ln of the noncentral Student-t density.
pub fn ln_nct_pdf<T: Real>(t: T, nu: DegreesOfFreedom<T>, delta: Noncentrality<T>) -> T {
    let d = delta.get();
    let central = ln_t_pdf(t, nu);
    if d == T::zero() {
        return central;
    }
    let nv = nu.get();
    let q = nv + t * t;
    let mu = d * t / q.sqrt();
    let half = T::lit(0.5);
    if mu >= T::zero() {
        let mu2 = mu * mu;
        let peak = half * (mu2 + (mu2 * mu2 + T::lit(4.0) * mu2 * nv).sqrt());
        if peak <= T::lit(SERIES_PEAK_LIMIT) {
            return central - half * d * d + ln_positive_series(nv, mu);
        }
    }
    // −νδ²/(2q) + ln I(ν, μ) − ln I(ν, 0)
    central - half * nv * d * d / q + ln_hermite_integral(nv, mu) - ln_hermite_integral_at_zero(nv)
}

pub fn nct_pdf<T: Real>(t: T, nu: DegreesOfFreedom<T>, delta: Noncentrality<T>) -> T {
    ln_nct_pdf(t, nu, delta).exp()
}

/// ln Σ_j (√2 μ)^j / j! · Γ((ν+j+1)/2) / Γ((ν+1)/2) for μ ≥ 0.
fn ln_positive_series<T: Real>(nu: T, mu: T) -> T {
    if mu == T::zero() {
        return T::zero();
    }
    let half = T::lit(0.5);
    let ln_step = (T::SQRT_2() * mu).ln();
    let cutoff = T::lit(SERIES_CUTOFF);
    // r_j = Γ((ν+j+2)/2) / Γ((ν+j+1)/2)
    let mut r = ln_gamma_half_ratio(half * (nu + T::one())).exp();
    let mut ln_term = T::zero();
    let mut run_max = T::zero();
    let mut acc = T::one();
    let mut j = 0usize;
    loop {
        let jn = T::count(j);
        let ln_ratio = ln_step + r.ln() - (jn + T::one()).ln();
        ln_term = ln_term + ln_ratio;
        r = half * (nu + jn + T::one()) / r;
        j += 1;
        if ln_term > run_max {
            acc = acc * (run_max - ln_term).exp() + T::one();
            run_max = ln_term;
        } else {
            acc = acc + (ln_term - run_max).exp();
        }
        if ln_ratio < T::zero() && ln_term < run_max - cutoff {
            break;
        }
    }
    run_max + acc.ln()
}

/// ln ∫₀^∞ x^ν exp(−(x − μ)²/2) dx.
fn ln_hermite_integral<T: Real>(nu: T, mu: T) -> T {
    let four = T::lit(4.0);
    let disc = (mu * mu + four * nu).sqrt();
    // Mode of the log-concave integrand, written to avoid cancellation when μ < 0.
    let mode = if mu >= T::zero() {
        T::lit(0.5) * (mu + disc)
    } else {
        T::lit(2.0) * nu / (disc - mu)
    };
    let log_integrand = |x: T| nu * x.ln() - T::lit(0.5) * (x - mu) * (x - mu);
    let peak = log_integrand(mode);
    // Curvature of the log integrand is at most −1, so ±12 around the mode
    // loses less than exp(−72) of the mass.
    let width = T::lit(12.0);
    let lo = (mode - width).max(T::zero());
    let hi = mode + width;
    let integrand = |x: T| {
        if x <= T::zero() {
            T::zero()
        } else {
            (log_integrand(x) - peak).exp()
        }
    };
    let tol = Tolerance::new(0.0, 1e-13, 200);
    let breaks = [lo, mode, hi];
    let value = match quadrature::adaptive(integrand, &breaks, tol) {
        Ok((integral, _)) => integral.value,
        Err(_) => T::nan(),
    };
    peak + value.ln()
}

/// ln ∫₀^∞ x^ν exp(−x²/2) dx = ((ν − 1)/2) ln 2 + ln Γ((ν + 1)/2).
fn ln_hermite_integral_at_zero<T: Real>(nu: T) -> T {
    let half = T::lit(0.5);
    half * (nu - T::one()) * T::LN_2() + ln_gamma_unchecked(half * (nu + T::one()))
}

/// Two-sided tail P(T² ≥ t2) for T ~ t_ν.
pub fn t_sf2<T: Real>(t2: T, nu: DegreesOfFreedom<T>) -> Result<T> {
    if !(t2 >= T::zero()) {
        return Err(Error::domain("t_sf2", format!("t2 = {t2} must be non-negative")));
    }
    if t2 == T::zero() {
        return Ok(T::one());
    }
    if t2.is_infinite() {
        return Ok(T::zero());
    }
    let nv = nu.get();
    let denom = nv + t2;
    beta_reg(T::lit(0.5) * nv, T::lit(0.5), nv / denom, t2 / denom)
}

/// Standard normal cumulative distribution function.
pub fn normal_cdf<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    let half = T::lit(0.5);
    let upper = gamma_q(half, half * x * x).unwrap_or(T::nan());
    if x < T::zero() {
        half * upper
    } else {
        T::one() - half * upper
    }
}

/// Standard normal survival function 1 − Φ(x).
pub fn normal_sf<T: Real>(x: T) -> T {
    normal_cdf(-x)
}

fn ln_normal_pdf<T: Real>(x: T) -> T {
    -T::lit(0.5) * (x * x + T::TAU().ln())
}

/// Standard normal quantile Φ⁻¹(p) for p ∈ (0, 1).
pub fn normal_quantile<T: Real>(p: T) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::domain("normal_quantile", format!("p = {p} must lie in (0, 1)")));
    }
    let half = T::lit(0.5);
    if p > half {
        return lower_normal_quantile(T::one() - p).map(|x| -x);
    }
    lower_normal_quantile(p)
}

fn lower_normal_quantile<T: Real>(p: T) -> Result<T> {
    let mut x = T::lit(acklam(p.as_f64()));
    // Halley refinement on Φ(x) − p.
    for _ in 0..4 {
        let e = normal_cdf(x) - p;
        let u = e * (-ln_normal_pdf(x)).exp();
        let step = u / (T::one() + T::lit(0.5) * x * u);
        x = x - step;
        if step.abs() <= T::epsilon() * (T::one() + x.abs()) {
            break;
        }
    }
    Ok(x)
}

/// Acklam's rational starting point for the lower half (p ≤ 1/2).
fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    let p = p.max(f64::MIN_POSITIVE);
    if p < 0.02425 {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Chi-square survival function P(X ≥ x) with `df` degrees of freedom.
pub fn chisq_sf<T: Real>(x: T, df: T) -> Result<T> {
    if !(df > T::zero()) {
        return Err(Error::domain("chisq_sf", format!("df = {df} must be positive")));
    }
    if !(x >= T::zero()) {
        return Err(Error::domain("chisq_sf", format!("x = {x} must be non-negative")));
    }
    let half = T::lit(0.5);
    gamma_q(half * df, half * x)
}
