//! Meta-analysis configuration and report assembly.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::format::{exact, sig6};
use crate::bf::{self, jzs_bf10, GPrior, LogBf, Sign};
use crate::distributions::{t_sf2, DegreesOfFreedom};
use crate::error::{Error, Result};
use crate::evidence::{classify, EvidenceLevel};
use crate::synthesis::{
    self, fisher_combine, normalize_to_abs_t, pearson_owen_stat, sample_fraction_weights, stouffer_combine,
    variance_weights, Combined, InformationCase, MetaMethod, MetaOptions, MetaResult, Normalized, NuRule,
    PearsonOwen, Reported, StudyRecord,
};

/// Which analyses a report runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    /// Every meta method; those the data cannot support are listed with the reason.
    #[default]
    All,
    /// The most informative methods the data support.
    Auto,
    Meta(MetaMethod),
    Fisher,
    Stouffer,
}

impl FromStr for MethodChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(MethodChoice::All),
            "auto" => Ok(MethodChoice::Auto),
            "fisher" => Ok(MethodChoice::Fisher),
            "stouffer" => Ok(MethodChoice::Stouffer),
            other => other
                .parse::<MetaMethod>()
                .map(MethodChoice::Meta)
                .map_err(|_| Error::Config(format!("unknown method '{s}'"))),
        }
    }
}

impl MethodChoice {
    pub fn name(self) -> &'static str {
        match self {
            MethodChoice::All => "all",
            MethodChoice::Auto => "auto",
            MethodChoice::Meta(m) => m.key(),
            MethodChoice::Fisher => "fisher",
            MethodChoice::Stouffer => "stouffer",
        }
    }
}

/// g of the final transform: the total sample size or a fixed value.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum GRule {
    #[default]
    TotalN,
    Fixed(f64),
}

impl FromStr for GRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("n") {
            return Ok(GRule::TotalN);
        }
        match s.parse::<f64>() {
            Ok(g) if g > 0.0 && g.is_finite() => Ok(GRule::Fixed(g)),
            _ => Err(Error::Config(format!("g must be 'N' or a positive number, got '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnalysisConfig {
    pub method: MethodChoice,
    pub g_rule: GRule,
    pub nu_rule: NuRule,
    pub n_total: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    method: Option<String>,
    g: Option<toml::Value>,
    nu_rule: Option<NuRule>,
    n_total: Option<usize>,
}

impl AnalysisConfig {
    /// Reads `method`, `g`, `nu_rule` and `n_total` from TOML.
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut cfg = AnalysisConfig::default();
        if let Some(m) = raw.method {
            cfg.method = m.parse()?;
        }
        if let Some(g) = raw.g {
            cfg.g_rule = match g {
                toml::Value::String(s) => s.parse()?,
                toml::Value::Float(v) => GRule::from_str(&v.to_string())?,
                toml::Value::Integer(v) => GRule::from_str(&v.to_string())?,
                other => return Err(Error::Config(format!("g must be 'N' or a number, got {other}"))),
            };
        }
        if let Some(nu) = raw.nu_rule {
            cfg.nu_rule = nu;
        }
        cfg.n_total = raw.n_total;
        Ok(cfg)
    }

    pub fn meta_options(&self) -> MetaOptions {
        MetaOptions {
            n_total: self.n_total,
            g_total: match self.g_rule {
                GRule::TotalN => None,
                GRule::Fixed(g) => Some(g),
            },
            nu_rule: self.nu_rule,
        }
    }
}

/// One study's line in the report: the input echoed exactly, then derived values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub study_id: String,
    pub reported: Reported,
    pub n: usize,
    pub n1: Option<usize>,
    pub n2: Option<usize>,
    pub ss_x: Option<f64>,
    pub sign: Sign,
    pub abs_t: f64,
    pub nu: f64,
    pub ss_x_used: Option<f64>,
    /// Single-study g-prior factor with g = n_k.
    pub two_log_bf_g: f64,
    pub two_log_bf_jzs: Option<f64>,
    pub w2_omega: f64,
    pub w2_v: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvidenceSummary {
    pub two_log_bf10: f64,
    pub bf10: f64,
    pub level_h1: EvidenceLevel,
    pub two_log_bf01: f64,
    pub level_h0: EvidenceLevel,
}

impl EvidenceSummary {
    pub fn new(bf: LogBf<f64>) -> Self {
        let b10 = bf.oriented(bf::Orientation::Bf10);
        let b01 = b10.flip();
        Self {
            two_log_bf10: b10.two_log_bf,
            bf10: b10.bf(),
            level_h1: classify(b10),
            two_log_bf01: b01.two_log_bf,
            level_h0: classify(b01),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MethodOutcome {
    Ok {
        method: MetaMethod,
        label: &'static str,
        combined_t: Option<f64>,
        n_total: usize,
        g_total: Option<f64>,
        evidence: EvidenceSummary,
    },
    InsufficientData {
        method: MetaMethod,
        label: &'static str,
        reasons: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalSummary {
    pub fisher: Option<Combined>,
    pub stouffer: Option<Combined>,
    pub pearson_owen: Option<PearsonOwen>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub method: &'static str,
    pub detected_case: InformationCase,
    pub studies: Vec<StudyRow>,
    pub meta: Vec<MethodOutcome>,
    pub classical: Option<ClassicalSummary>,
    pub warnings: Vec<String>,
}

fn study_rows(records: &[StudyRecord], normalized: &[Normalized]) -> Result<Vec<StudyRow>> {
    let n: Vec<usize> = normalized.iter().map(|s| s.n).collect();
    let omega = sample_fraction_weights(&n)?.squared();
    let detailed: Option<Vec<(f64, f64, f64)>> = normalized.iter().map(|s| Some((s.abs_t, s.nu, s.ss_x?))).collect();
    let variance = detailed.and_then(|inputs| variance_weights(&inputs).ok()).map(|w| w.squared());
    let mut rows = Vec::with_capacity(records.len());
    for (k, (r, s)) in records.iter().zip(normalized).enumerate() {
        let g = GPrior::unit_information(s.n)?;
        let two_log_bf_g = bf::gprior_bf10_from_t(s.abs_t * s.abs_t, s.n, g)?.two_log_bf;
        let two_log_bf_jzs = match s.ss_x {
            Some(ss) => Some(jzs_bf10(s.abs_t, DegreesOfFreedom::new(s.nu)?, ss)?.two_log_bf),
            None => None,
        };
        rows.push(StudyRow {
            study_id: r.id.clone(),
            reported: r.reported,
            n: r.n,
            n1: r.group_sizes.map(|g| g.0),
            n2: r.group_sizes.map(|g| g.1),
            ss_x: r.ss_x,
            sign: r.sign,
            abs_t: s.abs_t,
            nu: s.nu,
            ss_x_used: s.ss_x,
            two_log_bf_g,
            two_log_bf_jzs,
            w2_omega: omega[k],
            w2_v: variance.as_ref().map(|v| v[k]),
        });
    }
    Ok(rows)
}

fn outcome(method: MetaMethod, result: Result<MetaResult>) -> Result<MethodOutcome> {
    match result {
        Ok(m) => Ok(MethodOutcome::Ok {
            method,
            label: method.label(),
            combined_t: m.combined_t,
            n_total: m.n_total,
            g_total: m.g_total,
            evidence: EvidenceSummary::new(m.meta_bf),
        }),
        Err(Error::InsufficientData { studies, .. }) => Ok(MethodOutcome::InsufficientData {
            method,
            label: method.label(),
            reasons: studies,
        }),
        Err(e) => Err(e),
    }
}

fn two_sided_p(s: &Normalized, record: &StudyRecord) -> Result<f64> {
    match record.reported {
        Reported::PValueTwoSided { p } => Ok(p.max(synthesis::P_FLOOR)),
        _ => t_sf2(s.abs_t * s.abs_t, DegreesOfFreedom::new(s.nu)?),
    }
}

fn classical(records: &[StudyRecord], normalized: &[Normalized], want_fisher: bool, want_stouffer: bool) -> Result<ClassicalSummary> {
    let p2: Vec<f64> = normalized
        .iter()
        .zip(records)
        .map(|(s, r)| two_sided_p(s, r))
        .collect::<Result<_>>()?;
    let mut notes = Vec::new();
    let fisher = if want_fisher { Some(fisher_combine(&p2)?) } else { None };
    let pearson_owen = if want_fisher { Some(pearson_owen_stat(&p2)?) } else { None };
    let stouffer = if want_stouffer {
        let one_sided: Option<Vec<f64>> = normalized
            .iter()
            .zip(&p2)
            .map(|(s, &p)| match s.signed_t()? {
                t if t > 0.0 => Some(0.5 * p),
                t if t < 0.0 => Some(1.0 - 0.5 * p),
                _ => Some(0.5),
            })
            .collect();
        match one_sided {
            Some(p1) if p1.iter().all(|&p| p > 0.0 && p < 1.0) => Some(stouffer_combine(&p1)?),
            Some(_) => {
                notes.push("Stouffer combination skipped: a one-sided p-value is 0 or 1".into());
                None
            }
            None => {
                notes.push("Stouffer combination needs the sign of every nonzero statistic".into());
                None
            }
        }
    } else {
        None
    };
    Ok(ClassicalSummary {
        fisher,
        stouffer,
        pearson_owen,
        notes,
    })
}

/// Runs the configured analyses on `records`.
///
/// Insufficient data for a method is an entry in the report under `All`, and
/// an error when that method was requested explicitly.
pub fn build_report(records: &[StudyRecord], config: &AnalysisConfig) -> Result<Report> {
    if records.is_empty() {
        return Err(Error::Input("no studies supplied".into()));
    }
    let normalized: Vec<Normalized> = records
        .iter()
        .map(|r| normalize_to_abs_t(r, config.nu_rule))
        .collect::<Result<_>>()?;
    let detected_case = InformationCase::best_supported(&normalized);
    let studies = study_rows(records, &normalized)?;
    let opts = config.meta_options();

    let methods: Vec<MetaMethod> = match config.method {
        MethodChoice::All => MetaMethod::ALL.to_vec(),
        MethodChoice::Auto => match detected_case {
            InformationCase::Detailed => vec![MetaMethod::GDetailed, MetaMethod::Jzs],
            InformationCase::Partial => vec![MetaMethod::GPartial],
            InformationCase::Limited => vec![MetaMethod::GLimited],
        },
        MethodChoice::Meta(m) => vec![m],
        MethodChoice::Fisher | MethodChoice::Stouffer => Vec::new(),
    };
    let mut meta = Vec::with_capacity(methods.len());
    let mut warnings: Vec<String> = normalized.iter().flat_map(|s| s.warnings.clone()).collect();
    for &m in &methods {
        let result = synthesis::meta_bf(m, records, &opts);
        if matches!(config.method, MethodChoice::Meta(_)) {
            result.as_ref().map_err(Clone::clone)?;
        }
        meta.push(outcome(m, result)?);
    }

    let classical = match config.method {
        MethodChoice::All => Some(classical(records, &normalized, true, true)?),
        MethodChoice::Fisher => Some(classical(records, &normalized, true, false)?),
        MethodChoice::Stouffer => {
            let c = classical(records, &normalized, false, true)?;
            if c.stouffer.is_none() {
                return Err(Error::InsufficientData {
                    method: "Stouffer combination",
                    studies: c.notes,
                });
            }
            Some(c)
        }
        _ => None,
    };
    if let Some(c) = &classical {
        warnings.extend(c.notes.iter().cloned());
    }
    warnings.dedup();

    Ok(Report {
        tool: "bfmeta",
        version: env!("CARGO_PKG_VERSION"),
        method: config.method.name(),
        detected_case,
        studies,
        meta,
        classical,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "text" | "txt" => Ok(OutputFormat::Text),
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::Config(format!("unknown output format '{other}'"))),
        }
    }
}

fn opt(x: Option<f64>, f: fn(f64) -> String) -> String {
    x.map(f).unwrap_or_default()
}

fn sign_symbol(s: Sign) -> &'static str {
    match s {
        Sign::Pos => "+",
        Sign::Neg => "-",
        Sign::Unknown => "?",
    }
}

fn level_name(l: EvidenceLevel) -> &'static str {
    match l {
        EvidenceLevel::BareMention => "bare_mention",
        EvidenceLevel::Positive => "positive",
        EvidenceLevel::Strong => "strong",
        EvidenceLevel::VeryStrong => "very_strong",
    }
}

impl Report {
    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            OutputFormat::Csv => Ok(self.to_csv()),
            OutputFormat::Text => Ok(self.to_text()),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {} {} method={} case={:?}", self.tool, self.version, self.method, self.detected_case);
        out.push_str(
            "study_id,t_stat,t_squared,lambda,p_two_sided,two_log_bf,bf_prior,g,n,n1,n2,ss_x,sign,\
             abs_t,nu,ss_x_used,two_log_bf_g,two_log_bf_jzs,w2_omega,w2_v\n",
        );
        for r in &self.studies {
            let mut stat = [String::new(), String::new(), String::new(), String::new(), String::new(), String::new(), String::new()];
            match r.reported {
                Reported::TStat { t } => stat[0] = exact(t),
                Reported::TSquared { t2 } => stat[1] = exact(t2),
                Reported::Lambda { lambda } => stat[2] = exact(lambda),
                Reported::PValueTwoSided { p } => stat[3] = exact(p),
                Reported::BayesFactorG { two_log_bf, g } => {
                    stat[4] = exact(two_log_bf);
                    stat[5] = "g".into();
                    stat[6] = opt(g, exact);
                }
                Reported::BayesFactorJzs { two_log_bf } => {
                    stat[4] = exact(two_log_bf);
                    stat[5] = "jzs".into();
                }
            }
            let id = if r.study_id.contains([',', '"', '\n']) {
                format!("\"{}\"", r.study_id.replace('"', "\"\""))
            } else {
                r.study_id.clone()
            };
            let _ = writeln!(
                out,
                "{id},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                stat[0],
                stat[1],
                stat[2],
                stat[3],
                stat[4],
                stat[5],
                stat[6],
                r.n,
                r.n1.map(|v| v.to_string()).unwrap_or_default(),
                r.n2.map(|v| v.to_string()).unwrap_or_default(),
                opt(r.ss_x, exact),
                sign_symbol(r.sign),
                sig6(r.abs_t),
                sig6(r.nu),
                opt(r.ss_x_used, sig6),
                sig6(r.two_log_bf_g),
                opt(r.two_log_bf_jzs, sig6),
                sig6(r.w2_omega),
                opt(r.w2_v, sig6),
            );
        }
        out.push_str("# method,status,combined_t,two_log_bf10,bf10,level_h1,two_log_bf01,level_h0,n_total,g_total\n");
        for m in &self.meta {
            match m {
                MethodOutcome::Ok {
                    method,
                    combined_t,
                    n_total,
                    g_total,
                    evidence,
                    ..
                } => {
                    let _ = writeln!(
                        out,
                        "# {},ok,{},{},{},{},{},{},{},{}",
                        method.key(),
                        opt(*combined_t, sig6),
                        sig6(evidence.two_log_bf10),
                        sig6(evidence.bf10),
                        level_name(evidence.level_h1),
                        sig6(evidence.two_log_bf01),
                        level_name(evidence.level_h0),
                        n_total,
                        opt(*g_total, sig6),
                    );
                }
                MethodOutcome::InsufficientData { method, reasons, .. } => {
                    let _ = writeln!(out, "# {},insufficient_data,,,,,,,,,{}", method.key(), reasons.join("; "));
                }
            }
        }
        if let Some(c) = &self.classical {
            if let Some(f) = c.fisher {
                let _ = writeln!(out, "# fisher,ok,{},p={}", sig6(f.statistic), sig6(f.p_value));
            }
            if let Some(s) = c.stouffer {
                let _ = writeln!(out, "# stouffer,ok,{},p={}", sig6(s.statistic), sig6(s.p_value));
            }
            if let Some(po) = c.pearson_owen {
                let _ = writeln!(out, "# pearson_owen,ok,{},s_left={}", sig6(po.s_combined), sig6(po.s_left));
            }
        }
        for w in &self.warnings {
            let _ = writeln!(out, "# warning: {w}");
        }
        out
    }

    fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}  method: {}  information available: {:?}", self.tool, self.version, self.method, self.detected_case);
        out.push('\n');
        let _ = writeln!(
            out,
            "{:<12} {:>10} {:>7} {:>10} {:>12} {:>12} {:>10} {:>10}",
            "study", "|T|", "n", "ss_x", "2lnBF(g)", "2lnBF(JZS)", "w²(ω)", "w²(v)"
        );
        for r in &self.studies {
            let _ = writeln!(
                out,
                "{:<12} {:>10} {:>7} {:>10} {:>12} {:>12} {:>10} {:>10}",
                r.study_id,
                format!("{}{}", if r.sign == Sign::Neg { "-" } else { "" }, sig6(r.abs_t)),
                r.n,
                opt(r.ss_x_used, sig6),
                sig6(r.two_log_bf_g),
                opt(r.two_log_bf_jzs, sig6),
                sig6(r.w2_omega),
                opt(r.w2_v, sig6),
            );
        }
        if !self.meta.is_empty() {
            out.push('\n');
            let _ = writeln!(out, "{:<16} {:>12} {:>12} {:>12}  {}", "method", "combined T", "2lnBF10", "BF10", "evidence");
        }
        for m in &self.meta {
            match m {
                MethodOutcome::Ok {
                    label,
                    combined_t,
                    evidence,
                    ..
                } => {
                    let verdict = if evidence.two_log_bf10 >= 0.0 {
                        format!("{} for H1", evidence.level_h1.label())
                    } else {
                        format!("{} for H0", evidence.level_h0.label())
                    };
                    let _ = writeln!(
                        out,
                        "{:<16} {:>12} {:>12} {:>12}  {}",
                        label,
                        opt(*combined_t, sig6),
                        sig6(evidence.two_log_bf10),
                        sig6(evidence.bf10),
                        verdict
                    );
                }
                MethodOutcome::InsufficientData { label, reasons, .. } => {
                    let _ = writeln!(out, "{:<16} insufficient data: {}", label, reasons.join("; "));
                }
            }
        }
        if let Some(c) = &self.classical {
            out.push('\n');
            if let Some(f) = c.fisher {
                let _ = writeln!(out, "Fisher        S_F = {:>10}  p = {}", sig6(f.statistic), sig6(f.p_value));
            }
            if let Some(s) = c.stouffer {
                let _ = writeln!(out, "Stouffer      S_S = {:>10}  p = {}", sig6(s.statistic), sig6(s.p_value));
            }
            if let Some(po) = c.pearson_owen {
                let _ = writeln!(out, "Pearson-Owen  S_C = {:>10}", sig6(po.s_combined));
            }
        }
        if !self.warnings.is_empty() {
            out.push('\n');
            for w in &self.warnings {
                let _ = writeln!(out, "warning: {w}");
            }
        }
        out
    }
}
