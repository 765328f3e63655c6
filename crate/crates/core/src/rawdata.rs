//! Raw-data Bayes factor under the conjugate normal–inverse-gamma prior, plus
//! least-squares summaries of a simple regression.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::bf::LogBf;
use crate::error::{Error, Result};

/// Response `y`, nuisance design `x0` (n×q, with intercept) and covariates of interest `x1` (n×p).
#[derive(Debug, Clone)]
pub struct RawDataset {
    y: DVector<f64>,
    x0: DMatrix<f64>,
    x1: DMatrix<f64>,
}

fn cholesky(m: DMatrix<f64>, what: &str) -> Result<Cholesky<f64, Dyn>> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular(format!("{what} has non-finite entries")));
    }
    let scale = m.diagonal().iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    let chol = Cholesky::new(m).ok_or_else(|| Error::Singular(format!("{what} is not positive definite")))?;
    // Reject factorizations whose pivots collapse relative to the matrix scale.
    let tiny = scale * 1e-13;
    if chol.l_dirty().diagonal().iter().any(|&d| d * d <= tiny) {
        return Err(Error::Singular(format!("{what} is numerically singular")));
    }
    Ok(chol)
}

fn ln_det(chol: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
}

impl RawDataset {
    pub fn new(y: DVector<f64>, x0: DMatrix<f64>, x1: DMatrix<f64>) -> Result<Self> {
        let n = y.len();
        if x0.nrows() != n || x1.nrows() != n {
            return Err(Error::Input(format!(
                "row counts differ: y has {n}, X0 has {}, X1 has {}",
                x0.nrows(),
                x1.nrows()
            )));
        }
        let (q, p) = (x0.ncols(), x1.ncols());
        if q == 0 || p == 0 {
            return Err(Error::Input("X0 and X1 need at least one column each".into()));
        }
        if n <= p + q + 1 {
            return Err(Error::Input(format!("n = {n} must exceed p + q + 1 = {}", p + q + 1)));
        }
        cholesky(x0.tr_mul(&x0), "X0ᵗX0")?;
        Ok(Self { y, x0, x1 })
    }

    /// Intercept-only nuisance design with the given covariates of interest.
    pub fn with_intercept(y: DVector<f64>, x1: DMatrix<f64>) -> Result<Self> {
        let x0 = DMatrix::from_element(y.len(), 1, 1.0);
        Self::new(y, x0, x1)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn q(&self) -> usize {
        self.x0.ncols()
    }

    pub fn p(&self) -> usize {
        self.x1.ncols()
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    /// Projects the columns of `m` onto the orthogonal complement of span(X0).
    fn residualize(&self, m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let chol = cholesky(self.x0.tr_mul(&self.x0), "X0ᵗX0")?;
        let coef = chol.solve(&self.x0.tr_mul(m));
        Ok(m - &self.x0 * coef)
    }

    /// X1 with the nuisance columns projected out.
    pub fn residualized_design(&self) -> Result<DMatrix<f64>> {
        self.residualize(&self.x1)
    }

    /// Residual sum of squares of the nuisance-only fit.
    pub fn rss_null(&self) -> Result<f64> {
        let y = DMatrix::from_column_slice(self.n(), 1, self.y.as_slice());
        let r = self.residualize(&y)?;
        Ok(r.norm_squared())
    }

    /// Partial R² of X1 given X0.
    pub fn partial_r2(&self) -> Result<f64> {
        let x = self.residualized_design()?;
        let xty = x.tr_mul(&self.y);
        let chol = cholesky(x.tr_mul(&x), "XᵗX")?;
        let explained = xty.dot(&chol.solve(&xty));
        Ok(explained / self.rss_null()?)
    }

    /// The g-prior covariance V_β = g (XᵗX)⁻¹ with X the residualized design.
    pub fn g_prior_covariance(&self, g: f64) -> Result<DMatrix<f64>> {
        let x = self.residualized_design()?;
        let chol = cholesky(x.tr_mul(&x), "XᵗX")?;
        Ok(chol.inverse() * g)
    }
}

/// Bayes factor of M1: y = X0α + X1β + ε against M0: β = 0, with
/// β | τ ~ N(0, V_β/τ) and p(α, τ) ∝ τ^((q−2)/2).
pub fn nig_bf10_rawdata(data: &RawDataset, v_beta: &DMatrix<f64>) -> Result<LogBf<f64>> {
    let p = data.p();
    if v_beta.nrows() != p || v_beta.ncols() != p {
        return Err(Error::Input(format!(
            "V_β is {}×{} but X1 has {p} columns",
            v_beta.nrows(),
            v_beta.ncols()
        )));
    }
    let v_chol = cholesky(v_beta.clone(), "V_β")?;
    let x = data.residualized_design()?;
    let precision = x.tr_mul(&x) + v_chol.inverse();
    let m_chol = cholesky(precision, "XᵗX + V_β⁻¹")?;
    let xty = x.tr_mul(data.y());
    let explained = xty.dot(&m_chol.solve(&xty));
    let rss0 = data.rss_null()?;
    let shrink = 1.0 - explained / rss0;
    if !(shrink > 0.0) {
        return Err(Error::Singular("residual sum of squares vanishes under the alternative".into()));
    }
    let n = data.n() as f64;
    let two_log_bf = -ln_det(&v_chol) - ln_det(&m_chol) - n * shrink.ln();
    Ok(LogBf::bf10(two_log_bf))
}

/// Least-squares summary of y = a + b·x + ε.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimpleRegression {
    pub n: usize,
    pub slope: f64,
    pub sxx: f64,
    pub sxy: f64,
    pub syy: f64,
    pub sse: f64,
}

impl SimpleRegression {
    pub fn fit(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if y.len() != n {
            return Err(Error::Input(format!("x has {n} values but y has {}", y.len())));
        }
        if n < 3 {
            return Err(Error::Input(format!("simple regression needs at least 3 points, got {n}")));
        }
        let nf = n as f64;
        let mx = x.iter().sum::<f64>() / nf;
        let my = y.iter().sum::<f64>() / nf;
        let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
        for (&xi, &yi) in x.iter().zip(y) {
            let (dx, dy) = (xi - mx, yi - my);
            sxx += dx * dx;
            sxy += dx * dy;
            syy += dy * dy;
        }
        if !(sxx > 0.0) {
            return Err(Error::Singular("covariate has zero variance".into()));
        }
        let slope = sxy / sxx;
        let sse = (syy - slope * sxy).max(0.0);
        Ok(Self {
            n,
            slope,
            sxx,
            sxy,
            syy,
            sse,
        })
    }

    pub fn r2(&self) -> f64 {
        if self.syy > 0.0 {
            (self.sxy * self.sxy / (self.sxx * self.syy)).min(1.0)
        } else {
            0.0
        }
    }

    /// t statistic of the slope on n − 2 degrees of freedom.
    pub fn t_stat(&self) -> f64 {
        let nu = (self.n - 2) as f64;
        let se2 = self.sse / nu / self.sxx;
        self.slope / se2.sqrt()
    }
}
