//! Combining per-study statistics into a single meta-analytic Bayes factor.
//!
//! Three information regimes are supported. With signed statistics and
//! covariate sums of squares (Detailed), studies are weighted by the inverse
//! variance of their standardized effect. With signs and sample sizes only
//! (Partial), weights are √(n_k/N). With unsigned statistics (Limited) the
//! weighted sum of |T_k| is used. In all three cases the combined statistic is
//! turned into a Bayes factor through the g-prior formula in T² at (N, g).
//! The JZS method integrates the product of the study likelihoods directly.

use serde::Serialize;

use crate::bf::{self, jzs_bf10, jzs_ln_marginal, GPrior, JzsTerm, LogBf, Sign};
use crate::distributions::{chisq_sf, ln_t_pdf, normal_quantile, normal_sf, DegreesOfFreedom};
use crate::error::{Error, Result};
use crate::special::h_factor;

/// Two-sided p-values below this are raised to it (with a warning) before inversion.
pub const P_FLOOR: f64 = 1e-300;

/// The statistic a study reported, in its native scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Reported {
    TStat { t: f64 },
    TSquared { t2: f64 },
    Lambda { lambda: f64 },
    PValueTwoSided { p: f64 },
    /// `2 ln BF10` under the g-prior with the given g (default n).
    BayesFactorG { two_log_bf: f64, g: Option<f64> },
    /// `2 ln BF10` under the JZS prior.
    BayesFactorJzs { two_log_bf: f64 },
}

impl Reported {
    pub fn is_directional(&self) -> bool {
        matches!(self, Reported::TStat { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Reported::TStat { .. } => "t_stat",
            Reported::TSquared { .. } => "t_squared",
            Reported::Lambda { .. } => "lambda",
            Reported::PValueTwoSided { .. } => "p_two_sided",
            Reported::BayesFactorG { .. } => "two_log_bf_g",
            Reported::BayesFactorJzs { .. } => "two_log_bf_jzs",
        }
    }
}

/// How residual degrees of freedom follow from a study's sample size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
pub enum NuRule {
    /// ν = n − 2: two-sample comparison or simple regression.
    #[default]
    #[serde(rename = "n_minus_2")]
    TwoSample,
    /// ν = n − 1: one-sample comparison.
    #[serde(rename = "n_minus_1")]
    OneSample,
}

impl NuRule {
    pub fn nu(self, n: usize) -> Result<DegreesOfFreedom<f64>> {
        let lost = match self {
            NuRule::TwoSample => 2,
            NuRule::OneSample => 1,
        };
        if n <= lost {
            return Err(Error::domain("degrees of freedom", format!("n = {n} leaves no residual degrees of freedom")));
        }
        DegreesOfFreedom::new((n - lost) as f64)
    }
}

/// One study's summary as supplied by the user.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRecord {
    pub id: String,
    pub reported: Reported,
    pub n: usize,
    pub group_sizes: Option<(usize, usize)>,
    pub ss_x: Option<f64>,
    /// Effect direction. Constructors take it from a signed t statistic; setting
    /// it to `Unknown` hides the direction so that only unsigned methods apply.
    pub sign: Sign,
}

impl StudyRecord {
    /// A study reporting a signed t statistic from two groups of sizes `n1`, `n2`.
    pub fn two_sample_t(id: impl Into<String>, t: f64, n1: usize, n2: usize) -> Self {
        Self {
            id: id.into(),
            reported: Reported::TStat { t },
            n: n1 + n2,
            group_sizes: Some((n1, n2)),
            ss_x: None,
            sign: Sign::of(t),
        }
    }

    /// A study reporting `reported` on `n` observations with no further detail.
    pub fn new(id: impl Into<String>, reported: Reported, n: usize) -> Self {
        Self {
            id: id.into(),
            reported,
            n,
            group_sizes: None,
            ss_x: None,
            sign: match reported {
                Reported::TStat { t } => Sign::of(t),
                _ => Sign::Unknown,
            },
        }
    }

    pub fn with_ss_x(mut self, ss_x: f64) -> Self {
        self.ss_x = Some(ss_x);
        self
    }

    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.sign = sign;
        self
    }

    /// ss_x as given, or n₁n₂/(n₁+n₂) from the group sizes.
    pub fn covariate_ss(&self) -> Option<f64> {
        self.ss_x.or_else(|| {
            self.group_sizes.map(|(a, b)| {
                let (a, b) = (a as f64, b as f64);
                a * b / (a + b)
            })
        })
    }


    /// Structural checks that do not depend on the synthesis method.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Input(format!("study {}: {msg}", self.id)));
        if self.n <= 2 {
            return fail(format!("n = {} must exceed 2", self.n));
        }
        if let Some((a, b)) = self.group_sizes {
            if a == 0 || b == 0 || a + b != self.n {
                return fail(format!("group sizes ({a}, {b}) must be positive and sum to n = {}", self.n));
            }
        }
        if let Some(ss) = self.ss_x {
            if !(ss > 0.0 && ss.is_finite()) {
                return fail(format!("ss_x = {ss} must be positive"));
            }
        }
        if let Reported::TStat { t } = self.reported {
            let from_t = Sign::of(t);
            if from_t != Sign::Unknown && self.sign != Sign::Unknown && self.sign != from_t {
                return fail(format!("sign column contradicts t = {t}"));
            }
        }
        let value_ok = match self.reported {
            Reported::TStat { t } => t.is_finite(),
            Reported::TSquared { t2 } => t2 >= 0.0 && t2.is_finite(),
            Reported::Lambda { lambda } => lambda >= 0.0 && lambda.is_finite(),
            Reported::PValueTwoSided { p } => (0.0..=1.0).contains(&p),
            Reported::BayesFactorG { two_log_bf, g } => two_log_bf.is_finite() && g.is_none_or(|g| g > 0.0),
            Reported::BayesFactorJzs { two_log_bf } => two_log_bf.is_finite(),
        };
        if !value_ok {
            return fail(format!("{:?} is outside its admissible range", self.reported));
        }
        Ok(())
    }
}

/// |T_k| and sign recovered from whatever a study reported.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Normalized {
    pub id: String,
    pub abs_t: f64,
    pub sign: Sign,
    pub n: usize,
    pub nu: f64,
    pub ss_x: Option<f64>,
    /// Notes about adjusted inputs, such as clamped p-values.
    pub warnings: Vec<String>,
}

impl Normalized {
    /// Signed statistic, or `None` when a nonzero |T| has no known direction.
    pub fn signed_t(&self) -> Option<f64> {
        match self.sign {
            _ if self.abs_t == 0.0 => Some(0.0),
            Sign::Pos => Some(self.abs_t),
            Sign::Neg => Some(-self.abs_t),
            Sign::Unknown => None,
        }
    }
}

/// Converts a study's reported statistic into |T| on ν degrees of freedom.
pub fn normalize_to_abs_t(record: &StudyRecord, nu_rule: NuRule) -> Result<Normalized> {
    record.validate()?;
    let nu = nu_rule.nu(record.n)?;
    let mut warnings = Vec::new();
    let abs_t = match record.reported {
        Reported::TStat { t } => t.abs(),
        Reported::TSquared { t2 } => t2.sqrt(),
        Reported::Lambda { lambda } => bf::lambda_to_t2(lambda, record.n)?.sqrt(),
        Reported::PValueTwoSided { p } => {
            let clamped = p.max(P_FLOOR);
            if clamped != p {
                warnings.push(format!("study {}: p-value {p} clamped to {clamped}", record.id));
            }
            bf::p_to_t2(clamped, nu)?.sqrt()
        }
        Reported::BayesFactorG { two_log_bf, g } => {
            let g = GPrior::new(g.unwrap_or(record.n as f64))?;
            bf::bf_to_t2(LogBf::bf10(two_log_bf), record.n, g)?.sqrt()
        }
        Reported::BayesFactorJzs { two_log_bf } => {
            let ss = record.covariate_ss().ok_or_else(|| Error::InsufficientData {
                method: "JZS Bayes factor inversion",
                studies: vec![format!("{}: ss_x or group sizes required", record.id)],
            })?;
            jzs_to_abs_t(two_log_bf, nu, ss)?
        }
    };
    Ok(Normalized {
        id: record.id.clone(),
        abs_t,
        sign: record.sign,
        n: record.n,
        nu: nu.get(),
        ss_x: record.covariate_ss(),
        warnings,
    })
}

/// |T| whose JZS Bayes factor equals `two_log_bf`, by bisection on the monotone map.
fn jzs_to_abs_t(two_log_bf: f64, nu: DegreesOfFreedom<f64>, ss: f64) -> Result<f64> {
    let at = |t: f64| -> Result<f64> { Ok(jzs_bf10(t, nu, ss)?.two_log_bf) };
    let floor = at(0.0)?;
    if two_log_bf < floor - 1e-9 {
        return Err(Error::OutOfRange {
            op: "jzs inversion",
            detail: format!("2 ln BF10 = {two_log_bf} is below the T = 0 value {floor}"),
        });
    }
    if two_log_bf <= floor {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while at(hi)? < two_log_bf {
        lo = hi;
        hi *= 2.0;
        if hi > 1e8 {
            return Err(Error::OutOfRange {
                op: "jzs inversion",
                detail: format!("2 ln BF10 = {two_log_bf} needs |T| beyond 1e8"),
            });
        }
    }
    while hi - lo > 1e-10 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if at(mid)? < two_log_bf {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightScheme {
    Variance,
    SampleFraction,
    Custom,
}

/// Nonnegative study weights with Σ w_k² = 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyWeights {
    pub w: Vec<f64>,
    pub scheme: WeightScheme,
}

impl StudyWeights {
    /// Weights proportional to the square roots of `shares`.
    fn from_shares(shares: &[f64], scheme: WeightScheme) -> Result<Self> {
        if shares.is_empty() {
            return Err(Error::domain("weights", "at least one study is required"));
        }
        if shares.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
            return Err(Error::domain("weights", "weights must be finite and nonnegative"));
        }
        let total: f64 = shares.iter().sum();
        if !(total > 0.0) {
            return Err(Error::domain("weights", "weights must not all be zero"));
        }
        Ok(Self {
            w: shares.iter().map(|s| (s / total).sqrt()).collect(),
            scheme,
        })
    }

    /// User-supplied weights, rescaled so their squares sum to one.
    pub fn custom(raw: &[f64]) -> Result<Self> {
        let squares: Vec<f64> = raw.iter().map(|w| if *w >= 0.0 { w * w } else { f64::NAN }).collect();
        Self::from_shares(&squares, WeightScheme::Custom)
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn squared(&self) -> Vec<f64> {
        self.w.iter().map(|w| w * w).collect()
    }
}

/// Sampling variance of the standardized effect d_k = T_k / (H(ν/2) √ss_k).
///
/// The t statistic has no finite variance for ν ≤ 2, so such studies get an
/// infinite variance and therefore zero inverse-variance weight.
pub fn effect_variance(t: f64, nu: f64, ss: f64) -> Result<f64> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::domain("variance weights", format!("nu = {nu} must be positive")));
    }
    if !(ss > 0.0) {
        return Err(Error::domain("variance weights", format!("ss_x = {ss} must be positive")));
    }
    if nu <= 2.0 {
        return Ok(f64::INFINITY);
    }
    let h = h_factor(0.5 * nu)?;
    let h2 = h * h;
    let d = t / (h * ss.sqrt());
    Ok(nu / (h2 * ss * (nu - 2.0)) + (nu / ((nu - 2.0) * h2) - 1.0) * d * d)
}

/// Inverse-variance weights from (T_k, ν_k, ss_k).
pub fn variance_weights(studies: &[(f64, f64, f64)]) -> Result<StudyWeights> {
    let precision = studies
        .iter()
        .map(|&(t, nu, ss)| effect_variance(t, nu, ss).map(f64::recip))
        .collect::<Result<Vec<_>>>()?;
    StudyWeights::from_shares(&precision, WeightScheme::Variance)
}

/// ω_k = √(n_k / N).
pub fn sample_fraction_weights(n: &[usize]) -> Result<StudyWeights> {
    if n.contains(&0) {
        return Err(Error::domain("sample fraction weights", "sample sizes must be positive"));
    }
    let shares: Vec<f64> = n.iter().map(|&k| k as f64).collect();
    StudyWeights::from_shares(&shares, WeightScheme::SampleFraction)
}

/// T̃ = Σ w_k sign_k |T_k|; a zero statistic contributes nothing whatever its sign.
pub fn inverse_normal_combine(abs_t: &[f64], signs: &[Sign], weights: &StudyWeights) -> Result<f64> {
    if abs_t.len() != signs.len() || abs_t.len() != weights.len() {
        return Err(Error::domain("inverse normal combination", "statistics, signs and weights differ in length"));
    }
    let mut total = 0.0;
    for (k, ((&t, &s), &w)) in abs_t.iter().zip(signs).zip(&weights.w).enumerate() {
        let direction = match s {
            _ if t == 0.0 => 0.0,
            Sign::Pos => 1.0,
            Sign::Neg => -1.0,
            Sign::Unknown => {
                return Err(Error::domain(
                    "inverse normal combination",
                    format!("study {} has a nonzero statistic of unknown sign", k + 1),
                ))
            }
        };
        total += w * direction * t;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InformationCase {
    Detailed,
    Partial,
    Limited,
}

impl InformationCase {
    /// Per-study reasons why `studies` fall short of this case.
    pub fn shortfalls(self, studies: &[Normalized]) -> Vec<String> {
        let mut out = Vec::new();
        for s in studies {
            let mut missing = Vec::new();
            if matches!(self, InformationCase::Detailed | InformationCase::Partial) && s.signed_t().is_none() {
                missing.push("effect sign");
            }
            if self == InformationCase::Detailed && s.ss_x.is_none() {
                missing.push("ss_x or group sizes");
            }
            if !missing.is_empty() {
                out.push(format!("{}: missing {}", s.id, missing.join(" and ")));
            }
        }
        out
    }

    /// The richest case every study satisfies.
    pub fn best_supported(studies: &[Normalized]) -> Self {
        [InformationCase::Detailed, InformationCase::Partial]
            .into_iter()
            .find(|c| c.shortfalls(studies).is_empty())
            .unwrap_or(InformationCase::Limited)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
pub enum MetaMethod {
    #[serde(rename = "meta_bf_g_d")]
    GDetailed,
    #[serde(rename = "meta_bf_g_p")]
    GPartial,
    #[serde(rename = "meta_bf_g_l")]
    GLimited,
    #[serde(rename = "meta_bf_jzs")]
    Jzs,
}

impl MetaMethod {
    pub const ALL: [MetaMethod; 4] = [MetaMethod::GDetailed, MetaMethod::GPartial, MetaMethod::GLimited, MetaMethod::Jzs];

    pub fn case(self) -> InformationCase {
        match self {
            MetaMethod::GDetailed | MetaMethod::Jzs => InformationCase::Detailed,
            MetaMethod::GPartial => InformationCase::Partial,
            MetaMethod::GLimited => InformationCase::Limited,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MetaMethod::GDetailed => "Meta-BF_g^(D)",
            MetaMethod::GPartial => "Meta-BF_g^(P)",
            MetaMethod::GLimited => "Meta-BF_g^(L)",
            MetaMethod::Jzs => "Meta-BF_JZS",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            MetaMethod::GDetailed => "meta_bf_g_d",
            MetaMethod::GPartial => "meta_bf_g_p",
            MetaMethod::GLimited => "meta_bf_g_l",
            MetaMethod::Jzs => "meta_bf_jzs",
        }
    }
}

impl std::str::FromStr for MetaMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d" | "detailed" | "g_d" | "meta_bf_g_d" => Ok(MetaMethod::GDetailed),
            "p" | "partial" | "g_p" | "meta_bf_g_p" => Ok(MetaMethod::GPartial),
            "l" | "limited" | "g_l" | "meta_bf_g_l" => Ok(MetaMethod::GLimited),
            "jzs" | "meta_bf_jzs" => Ok(MetaMethod::Jzs),
            other => Err(Error::Input(format!("unknown synthesis method '{other}' (expected d, p, l or jzs)"))),
        }
    }
}

/// Overrides for the total sample size and g used in the final transform.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetaOptions {
    /// Sample size entering the final transform; defaults to Σ n_k.
    pub n_total: Option<usize>,
    /// g of the final transform; defaults to the total sample size.
    pub g_total: Option<f64>,
    pub nu_rule: NuRule,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetaResult {
    pub method: MetaMethod,
    pub case_used: InformationCase,
    /// T̃ for the Detailed and Partial methods, S_C for the Limited method, absent for JZS.
    pub combined_t: Option<f64>,
    pub meta_bf: LogBf<f64>,
    pub weights: Option<StudyWeights>,
    pub n_total: usize,
    pub g_total: Option<f64>,
    pub studies: Vec<Normalized>,
    pub warnings: Vec<String>,
}

fn normalize_all(records: &[StudyRecord], opts: &MetaOptions) -> Result<Vec<Normalized>> {
    if records.is_empty() {
        return Err(Error::Input("no studies supplied".into()));
    }
    records.iter().map(|r| normalize_to_abs_t(r, opts.nu_rule)).collect()
}

fn require(method: MetaMethod, studies: &[Normalized]) -> Result<()> {
    let missing = method.case().shortfalls(studies);
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::InsufficientData {
            method: method.label(),
            studies: missing,
        })
    }
}

fn totals(studies: &[Normalized], opts: &MetaOptions) -> Result<(usize, GPrior<f64>)> {
    let n_total = opts.n_total.unwrap_or_else(|| studies.iter().map(|s| s.n).sum());
    let g = GPrior::new(opts.g_total.unwrap_or(n_total as f64))?;
    Ok((n_total, g))
}

fn finish_g(method: MetaMethod, studies: Vec<Normalized>, weights: StudyWeights, combined: f64, opts: &MetaOptions) -> Result<MetaResult> {
    let (n_total, g) = totals(&studies, opts)?;
    let meta_bf = bf::gprior_bf10_from_t(combined * combined, n_total, g)?;
    let warnings = studies.iter().flat_map(|s| s.warnings.clone()).collect();
    Ok(MetaResult {
        method,
        case_used: method.case(),
        combined_t: Some(combined),
        meta_bf,
        weights: Some(weights),
        n_total,
        g_total: Some(g.get()),
        studies,
        warnings,
    })
}

fn combine_signed(studies: &[Normalized], weights: &StudyWeights) -> Result<f64> {
    let abs_t: Vec<f64> = studies.iter().map(|s| s.abs_t).collect();
    let signs: Vec<Sign> = studies.iter().map(|s| s.sign).collect();
    inverse_normal_combine(&abs_t, &signs, weights)
}

/// Inverse-variance weighted synthesis (needs signs and covariate sums of squares).
pub fn meta_bf_g_detailed(records: &[StudyRecord], opts: &MetaOptions) -> Result<MetaResult> {
    let studies = normalize_all(records, opts)?;
    require(MetaMethod::GDetailed, &studies)?;
    let inputs: Vec<(f64, f64, f64)> = studies
        .iter()
        .map(|s| (s.abs_t, s.nu, s.ss_x.expect("checked by require")))
        .collect();
    let weights = variance_weights(&inputs)?;
    let combined = combine_signed(&studies, &weights)?;
    finish_g(MetaMethod::GDetailed, studies, weights, combined, opts)
}

/// Sample-fraction weighted synthesis (needs signs and sample sizes).
pub fn meta_bf_g_partial(records: &[StudyRecord], opts: &MetaOptions) -> Result<MetaResult> {
    let studies = normalize_all(records, opts)?;
    require(MetaMethod::GPartial, &studies)?;
    let n: Vec<usize> = studies.iter().map(|s| s.n).collect();
    let weights = sample_fraction_weights(&n)?;
    let combined = combine_signed(&studies, &weights)?;
    finish_g(MetaMethod::GPartial, studies, weights, combined, opts)
}

/// Synthesis of unsigned statistics through S_C = Σ ω_k |T_k|.
pub fn meta_bf_g_limited(records: &[StudyRecord], opts: &MetaOptions) -> Result<MetaResult> {
    let studies = normalize_all(records, opts)?;
    let n: Vec<usize> = studies.iter().map(|s| s.n).collect();
    let weights = sample_fraction_weights(&n)?;
    let combined = studies.iter().zip(&weights.w).map(|(s, w)| w * s.abs_t).sum();
    finish_g(MetaMethod::GLimited, studies, weights, combined, opts)
}

/// JZS synthesis: the product of the study likelihoods integrated against one
/// Cauchy prior on the common standardized effect.
pub fn meta_bf_jzs(records: &[StudyRecord], opts: &MetaOptions) -> Result<MetaResult> {
    let studies = normalize_all(records, opts)?;
    require(MetaMethod::Jzs, &studies)?;
    let mut terms = Vec::with_capacity(studies.len());
    let mut ln_null = 0.0;
    for s in &studies {
        let t = s.signed_t().expect("checked by require");
        let nu = DegreesOfFreedom::new(s.nu)?;
        terms.push(JzsTerm {
            t,
            nu,
            sqrt_ss: s.ss_x.expect("checked by require").sqrt(),
        });
        ln_null += ln_t_pdf(t, nu);
    }
    let ln_alt = jzs_ln_marginal(&terms)?;
    let n_total = opts.n_total.unwrap_or_else(|| studies.iter().map(|s| s.n).sum());
    let warnings = studies.iter().flat_map(|s| s.warnings.clone()).collect();
    Ok(MetaResult {
        method: MetaMethod::Jzs,
        case_used: InformationCase::Detailed,
        combined_t: None,
        meta_bf: LogBf::bf10(2.0 * (ln_alt - ln_null)),
        weights: None,
        n_total,
        g_total: None,
        studies,
        warnings,
    })
}

pub fn meta_bf(method: MetaMethod, records: &[StudyRecord], opts: &MetaOptions) -> Result<MetaResult> {
    match method {
        MetaMethod::GDetailed => meta_bf_g_detailed(records, opts),
        MetaMethod::GPartial => meta_bf_g_partial(records, opts),
        MetaMethod::GLimited => meta_bf_g_limited(records, opts),
        MetaMethod::Jzs => meta_bf_jzs(records, opts),
    }
}

fn check_p(op: &'static str, p: &[f64], allow_one: bool) -> Result<()> {
    if p.is_empty() {
        return Err(Error::domain(op, "at least one p-value is required"));
    }
    for (k, &v) in p.iter().enumerate() {
        let ok = v > 0.0 && (v < 1.0 || (allow_one && v == 1.0));
        if !ok {
            return Err(Error::domain(op, format!("p-value {} = {v} is outside the admissible range", k + 1)));
        }
    }
    Ok(())
}

/// A combined test statistic with its p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Combined {
    pub statistic: f64,
    pub p_value: f64,
}

/// Fisher's S_F = −2 Σ ln p_k, referred to χ² on 2K degrees of freedom.
pub fn fisher_combine(p: &[f64]) -> Result<Combined> {
    check_p("fisher_combine", p, true)?;
    let statistic = -2.0 * p.iter().map(|v| v.ln()).sum::<f64>();
    let p_value = chisq_sf(statistic, 2.0 * p.len() as f64)?;
    Ok(Combined { statistic, p_value })
}

/// Stouffer's S_S = Σ Φ⁻¹(1 − p_k), referred to N(0, K).
pub fn stouffer_combine(p: &[f64]) -> Result<Combined> {
    check_p("stouffer_combine", p, false)?;
    let mut statistic = 0.0;
    for &v in p {
        statistic -= normal_quantile(v)?;
    }
    let p_value = normal_sf(statistic / (p.len() as f64).sqrt());
    Ok(Combined { statistic, p_value })
}

/// The left, right and combined statistics of the Pearson–Owen construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PearsonOwen {
    pub s_left: f64,
    pub s_right: f64,
    pub s_combined: f64,
}

pub fn pearson_owen_stat(p: &[f64]) -> Result<PearsonOwen> {
    check_p("pearson_owen_stat", p, true)?;
    let mut s_left = 0.0;
    for &v in p {
        s_left -= normal_quantile(0.5 * v)?;
    }
    let s_right = -s_left;
    Ok(PearsonOwen {
        s_left,
        s_right,
        s_combined: s_left.max(s_right),
    })
}
