//! Single-study Bayes factors from command-line style inputs.

use std::fmt::Write as _;

use serde::Serialize;

use super::format::sig6;
use super::report::{EvidenceSummary, OutputFormat};
use crate::bf::{gprior_bf10_from_t, jzs_bf10, GPrior};
use crate::error::{Error, Result};
use crate::synthesis::NuRule;

/// What is known about one study.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SingleStudyInput {
    pub t: f64,
    pub n: Option<usize>,
    pub group_sizes: Option<(usize, usize)>,
    pub ss_x: Option<f64>,
    /// g of the g-prior; defaults to n.
    pub g: Option<f64>,
    pub nu_rule: NuRule,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleStudyReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub t: f64,
    pub n: usize,
    pub nu: f64,
    pub g: f64,
    pub ss_x: f64,
    pub g_prior: EvidenceSummary,
    pub jzs: EvidenceSummary,
    pub notes: Vec<String>,
}

impl SingleStudyInput {
    /// Resolves sample size and ss_x, then evaluates both priors.
    ///
    /// Without `ss_x` or group sizes a balanced two-group design is assumed,
    /// giving ss_x = n/4.
    pub fn evaluate(&self) -> Result<SingleStudyReport> {
        if !self.t.is_finite() {
            return Err(Error::Input(format!("t must be finite, got {}", self.t)));
        }
        let n = match (self.n, self.group_sizes) {
            (Some(n), Some((a, b))) if n != a + b => {
                return Err(Error::Input(format!("n = {n} but n1 + n2 = {}", a + b)));
            }
            (Some(n), _) => n,
            (None, Some((a, b))) => a + b,
            (None, None) => return Err(Error::Input("give n or both n1 and n2".into())),
        };
        let mut notes = Vec::new();
        let ss_x = match (self.ss_x, self.group_sizes) {
            (Some(ss), _) => ss,
            (None, Some((a, b))) => (a * b) as f64 / (a + b) as f64,
            (None, None) => {
                notes.push(format!("ss_x not given; assumed balanced groups, ss_x = n/4 = {}", sig6(n as f64 / 4.0)));
                n as f64 / 4.0
            }
        };
        if !(ss_x > 0.0) {
            return Err(Error::Input(format!("ss_x must be positive, got {ss_x}")));
        }
        let g = GPrior::new(self.g.unwrap_or(n as f64))?;
        let nu = self.nu_rule.nu(n)?;
        let g_bf = gprior_bf10_from_t(self.t * self.t, n, g)?;
        let jzs = jzs_bf10(self.t, nu, ss_x)?;
        Ok(SingleStudyReport {
            tool: "bfmeta",
            version: env!("CARGO_PKG_VERSION"),
            t: self.t,
            n,
            nu: nu.get(),
            g: g.get(),
            ss_x,
            g_prior: EvidenceSummary::new(g_bf),
            jzs: EvidenceSummary::new(jzs),
            notes,
        })
    }
}

impl SingleStudyReport {
    pub fn render(&self, format: OutputFormat) -> Result<String> {
        let mut out = String::new();
        match format {
            OutputFormat::Json => {
                out = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
                out.push('\n');
            }
            OutputFormat::Csv => {
                out.push_str("t,n,nu,g,ss_x,two_log_bf_g,two_log_bf_jzs\n");
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    self.t,
                    self.n,
                    sig6(self.nu),
                    sig6(self.g),
                    sig6(self.ss_x),
                    sig6(self.g_prior.two_log_bf10),
                    sig6(self.jzs.two_log_bf10)
                );
                for note in &self.notes {
                    let _ = writeln!(out, "# {note}");
                }
            }
            OutputFormat::Text => {
                let _ = writeln!(
                    out,
                    "T = {}  n = {}  nu = {}  g = {}  ss_x = {}",
                    sig6(self.t),
                    self.n,
                    sig6(self.nu),
                    sig6(self.g),
                    sig6(self.ss_x)
                );
                for (name, e) in [("g-prior", &self.g_prior), ("JZS", &self.jzs)] {
                    let verdict = if e.two_log_bf10 >= 0.0 {
                        format!("{} for H1", e.level_h1.label())
                    } else {
                        format!("{} for H0", e.level_h0.label())
                    };
                    let _ = writeln!(out, "{name:<8} 2lnBF10 = {:>10}  BF10 = {:>10}  {verdict}", sig6(e.two_log_bf10), sig6(e.bf10));
                }
                for note in &self.notes {
                    let _ = writeln!(out, "note: {note}");
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_rows() {
        let five = SingleStudyInput {
            t: 3.6,
            group_sizes: Some((8, 8)),
            ..Default::default()
        }
        .evaluate()
        .unwrap();
        assert!((five.g_prior.two_log_bf10 - 6.2).abs() < 0.05);
        assert!((five.jzs.two_log_bf10 - 5.4).abs() < 0.05);
        assert_eq!(five.ss_x, 4.0);

        let six = SingleStudyInput {
            t: 0.0,
            n: Some(66),
            g: Some(66.0),
            ..Default::default()
        }
        .evaluate()
        .unwrap();
        assert!((six.g_prior.two_log_bf10 + 67f64.ln()).abs() < 1e-12);

        let two = SingleStudyInput {
            t: 0.5,
            n: Some(32),
            ..Default::default()
        }
        .evaluate()
        .unwrap();
        assert!((two.g_prior.two_log_bf10 + 3.2).abs() < 0.05);
        assert!((two.jzs.two_log_bf10 + 2.5).abs() < 0.05);
        assert_eq!(two.notes.len(), 1);
    }

    #[test]
    fn inconsistent_sizes_are_rejected() {
        let bad = SingleStudyInput {
            t: 1.0,
            n: Some(20),
            group_sizes: Some((8, 8)),
            ..Default::default()
        };
        assert!(matches!(bad.evaluate(), Err(Error::Input(_))));
        assert!(SingleStudyInput { t: 1.0, ..Default::default() }.evaluate().is_err());
    }
}
