//! Empirical risk measures over scalar samples: value at risk, conditional
//! value at risk, entropic value at risk, and the chi-square divergence risk.
//!
//! The quantile convention is the left-continuous infimum form
//! `Q_p = inf { t : F(t) >= p }`, i.e. the order statistic at index
//! `ceil(p N)` (1-based). Statistics libraries differ here; everything in
//! this module is pinned to that convention.

use serde::Serialize;

use crate::error::{Error, Result};

/// A finite sample with a cached sort.
#[derive(Debug, Clone)]
pub struct SampleSet {
    raw: Vec<f64>,
    sorted: Vec<f64>,
}

impl SampleSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySampleSet);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "sample set contains non-finite values".into(),
            ));
        }
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self { raw: values, sorted })
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn mean(&self) -> f64 {
        self.raw.iter().sum::<f64>() / self.raw.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.sorted[0]
    }

    pub fn max(&self) -> f64 {
        *self.sorted.last().unwrap()
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p={p} outside [0, 1)")));
    }
    Ok(())
}

/// Empirical `p`-quantile: order statistic at `ceil(p N)`, the minimum at
/// `p = 0`.
pub fn var_p(samples: &SampleSet, p: f64) -> Result<f64> {
    check_p(p)?;
    let n = samples.len();
    let idx = ((p * n as f64).ceil() as usize).clamp(1, n);
    Ok(samples.sorted[idx - 1])
}

/// Exact integral of the empirical quantile function over `(p, 1]`, i.e. a
/// tail average with fractional weight on the crossing order statistic.
pub fn cvar_p(samples: &SampleSet, p: f64) -> Result<f64> {
    check_p(p)?;
    let n = samples.len();
    let nf = n as f64;
    if p == 0.0 {
        return Ok(samples.mean());
    }
    let k = ((p * nf).ceil() as usize).clamp(1, n);
    // quantile is samples.sorted[k-1] on (p, k/N], then steps every 1/N
    let mut integral = samples.sorted[k - 1] * (k as f64 / nf - p);
    for j in k..n {
        integral += samples.sorted[j] / nf;
    }
    Ok(integral / (1.0 - p))
}

/// Entropic value at risk: minimizes
/// `(log E[e^(eta U)] - log(1-p)) / eta` over `eta > 0` by golden-section
/// search on `log eta`, with log-sum-exp throughout.
///
/// The search window is keyed to the sample spread `max U - min U` (the only
/// scale the objective depends on after centering), which makes the
/// estimator exactly translation-equivariant and positively homogeneous.
/// Whenever the minimizer binds at the upper end (the infimum approaches the
/// sample maximum, i.e. `p` is extreme for the sample size) the window is
/// extended until the improvement falls below tolerance.
pub fn evar_p(samples: &SampleSet, p: f64) -> Result<f64> {
    check_p(p)?;
    let n = samples.len() as f64;
    let neg_log1p = -(1.0 - p).ln();
    let top = *samples.sorted.last().unwrap();
    let spread = top - samples.sorted[0];
    if spread == 0.0 {
        return Ok(top);
    }
    // centered objective: evar - max = (neg_log1p + logsumexp(eta (u - max)) - log n) / eta
    let objective = |eta: f64| -> f64 {
        let lse = samples
            .raw
            .iter()
            .map(|&u| (eta * (u - top)).exp())
            .sum::<f64>()
            .ln();
        (neg_log1p + lse - n.ln()) / eta
    };
    let golden = |lo_eta: f64, hi_eta: f64| -> (f64, f64) {
        let (mut lo, mut hi) = (lo_eta.ln(), hi_eta.ln());
        let phi = (5.0f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - phi * (hi - lo);
        let mut x2 = lo + phi * (hi - lo);
        let mut f1 = objective(x1.exp());
        let mut f2 = objective(x2.exp());
        while (hi - lo) > 1e-9 {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = objective(x1.exp());
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = objective(x2.exp());
            }
        }
        let m = 0.5 * (lo + hi);
        (m.exp(), objective(m.exp()))
    };
    let (mut lo_eta, mut hi_eta) = (1e-8 / spread, 50.0 / spread);
    let (mut best_eta, mut best) = golden(lo_eta, hi_eta);
    // extend while the optimum presses the upper boundary
    let mut extensions = 0;
    while best_eta > 0.9 * hi_eta && extensions < 60 {
        lo_eta = hi_eta * 0.5;
        hi_eta *= 8.0;
        let (eta2, val2) = golden(lo_eta, hi_eta);
        if val2 >= best - 1e-12 * (1.0 + best.abs()) {
            best = best.min(val2);
            break;
        }
        best_eta = eta2;
        best = val2;
        extensions += 1;
    }
    // the centered infimum is never positive (the objective tends to 0 from
    // below as eta grows when p is extreme, and the estimator never exceeds
    // the sample maximum)
    Ok(top + best.min(0.0))
}

/// Chi-square divergence risk at radius `r >= 0`:
/// `inf_eta sqrt(1 + 2r) sqrt(E (U - eta)_+^2) + eta`, minimized over
/// `eta` in `[min U, max U]` by ternary search (the objective is convex;
/// below the sample minimum the slope is nonpositive, above the maximum
/// `eta` dominates).
pub fn chi2_risk(samples: &SampleSet, r: f64) -> Result<f64> {
    if r < 0.0 {
        return Err(Error::InvalidParameter(format!("r={r} must be >= 0")));
    }
    let n = samples.len() as f64;
    let coef = (1.0 + 2.0 * r).sqrt();
    let objective = |eta: f64| -> f64 {
        let ms: f64 = samples
            .raw
            .iter()
            .map(|&u| {
                let t = (u - eta).max(0.0);
                t * t
            })
            .sum::<f64>()
            / n;
        coef * ms.sqrt() + eta
    };
    let (mut lo, mut hi) = (samples.min(), samples.max());
    let tol = 1e-8 * (hi - lo).max(1.0);
    while hi - lo > tol {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if objective(m1) <= objective(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    Ok(objective(0.5 * (lo + hi)))
}

/// Summary of all estimators at one level, as serialized by the harness.
#[derive(Debug, Clone, Serialize)]
pub struct RiskReport {
    pub p: f64,
    pub var: f64,
    pub cvar: f64,
    pub evar: f64,
    pub chi2_r: f64,
    pub chi2: f64,
    pub n: usize,
}

/// Evaluate VaR/CVaR/EVaR at level `p` and the chi-square risk at the
/// matched radius `r = p / (1 - p)` (so that `p = 1 - 1/(1+r)`).
pub fn risk_report(samples: &SampleSet, p: f64) -> Result<RiskReport> {
    let r = p / (1.0 - p);
    Ok(RiskReport {
        p,
        var: var_p(samples, p)?,
        cvar: cvar_p(samples, p)?,
        evar: evar_p(samples, p)?,
        chi2_r: r,
        chi2: chi2_risk(samples, r)?,
        n: samples.len(),
    })
}
