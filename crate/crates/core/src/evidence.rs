//! Verbal evidence categories and quadratically weighted Cohen's κ.

use serde::Serialize;

use crate::bf::LogBf;
use crate::error::{Error, Result};

/// Evidence grades on the `2 ln BF` scale with half-open bins
/// (−∞, 2), [2, 6), [6, 10) and [10, ∞).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum EvidenceLevel {
    BareMention,
    Positive,
    Strong,
    VeryStrong,
}

impl EvidenceLevel {
    pub const ALL: [EvidenceLevel; 4] = [
        EvidenceLevel::BareMention,
        EvidenceLevel::Positive,
        EvidenceLevel::Strong,
        EvidenceLevel::VeryStrong,
    ];

    /// Grade of a raw `2 ln BF` value in favour of the numerator hypothesis.
    pub fn from_two_log_bf(x: f64) -> Self {
        if x >= 10.0 {
            EvidenceLevel::VeryStrong
        } else if x >= 6.0 {
            EvidenceLevel::Strong
        } else if x >= 2.0 {
            EvidenceLevel::Positive
        } else {
            // Negative values and NaN land here.
            EvidenceLevel::BareMention
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            EvidenceLevel::BareMention => "not worth more than a bare mention",
            EvidenceLevel::Positive => "positive",
            EvidenceLevel::Strong => "strong",
            EvidenceLevel::VeryStrong => "very strong",
        }
    }
}

/// Grades the evidence a Bayes factor carries for its numerator hypothesis.
/// Pass a BF10 to grade support for H1, a BF01 for support of H0.
pub fn classify(bf: LogBf<f64>) -> EvidenceLevel {
    EvidenceLevel::from_two_log_bf(bf.two_log_bf)
}

/// C×C cross-classification of reference (rows) against estimator (columns).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgreementTable {
    counts: Vec<Vec<u64>>,
}

impl AgreementTable {
    pub fn new(categories: usize) -> Self {
        Self {
            counts: vec![vec![0; categories]; categories],
        }
    }

    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let c = counts.len();
        if c < 2 || counts.iter().any(|row| row.len() != c) {
            return Err(Error::domain("agreement table", "counts must form a square matrix with at least two categories"));
        }
        Ok(Self { counts })
    }

    /// Cross-classifies paired evidence levels.
    pub fn from_levels(pairs: impl IntoIterator<Item = (EvidenceLevel, EvidenceLevel)>) -> Self {
        let mut t = Self::new(EvidenceLevel::ALL.len());
        for (r, e) in pairs {
            t.add(r.index(), e.index());
        }
        t
    }

    pub fn add(&mut self, reference: usize, estimate: usize) {
        self.counts[reference][estimate] += 1;
    }

    pub fn categories(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

/// Cohen's κ with quadratic disagreement weights ((i − j)/(C − 1))².
pub fn weighted_kappa(table: &AgreementTable) -> Result<f64> {
    let c = table.categories();
    let total = table.total();
    if total == 0 {
        return Err(Error::domain("weighted kappa", "the agreement table is empty"));
    }
    let n = total as f64;
    let rows: Vec<f64> = table.counts.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let cols: Vec<f64> = (0..c).map(|j| table.counts.iter().map(|r| r[j]).sum::<u64>() as f64).collect();
    let scale = ((c - 1) * (c - 1)) as f64;
    let (mut observed, mut expected) = (0.0, 0.0);
    for i in 0..c {
        for j in 0..c {
            let d = i.abs_diff(j);
            if d == 0 {
                continue;
            }
            let w = (d * d) as f64 / scale;
            observed += w * table.counts[i][j] as f64 / n;
            expected += w * rows[i] * cols[j] / (n * n);
        }
    }
    if expected == 0.0 {
        return Err(Error::domain(
            "weighted kappa",
            "agreement is undefined: both raters place every case in the same category",
        ));
    }
    Ok(1.0 - observed / expected)
}
