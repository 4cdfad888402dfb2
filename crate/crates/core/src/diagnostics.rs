//! Run diagnostics: per-record geometric summaries, CSV I/O and tail monitors.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::speed::ScaledSpeedContext;
use crate::sphere::io::fmt_f64;
use crate::sphere::WeingartenField;
use crate::symfunc::cone_margin;

/// CSV column order.
pub const COLUMNS: [&str; 12] = [
    "tau",
    "r_min",
    "r_max",
    "osc",
    "grad_phi_max",
    "grad_r_max",
    "u_min",
    "phi_min_cap",
    "phi_max_cap",
    "cone_margin",
    "a_max",
    "dt",
];

/// Values at or below this are treated as roundoff by [`DiagnosticsSeries::tail_fit`].
pub const FIT_FLOOR: f64 = 1e-12;

/// One time slice of the run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticRecord {
    pub tau: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub osc: f64,
    pub grad_phi_max: f64,
    pub grad_r_max: f64,
    pub u_min: f64,
    /// min over nodes of Phi = lambda^beta f(r / lambda) sigma_k^alpha
    pub phi_min: f64,
    pub phi_max: f64,
    pub cone_margin: f64,
    /// largest |principal curvature|
    pub a_max: f64,
    pub dt: f64,
}

impl DiagnosticRecord {
    /// Summarizes a geometry field. Reductions run sequentially in node order.
    pub fn measure(tau: f64, field: &WeingartenField, ctx: &ScaledSpeedContext<'_>, dt: f64) -> Result<Self> {
        let prof = ctx.profile();
        let (k, alpha) = (prof.k(), prof.alpha());
        let mut rec = DiagnosticRecord {
            tau,
            r_min: f64::INFINITY,
            r_max: f64::NEG_INFINITY,
            osc: 0.0,
            grad_phi_max: 0.0,
            grad_r_max: 0.0,
            u_min: f64::INFINITY,
            phi_min: f64::INFINITY,
            phi_max: f64::NEG_INFINITY,
            cone_margin: f64::INFINITY,
            a_max: 0.0,
            dt,
        };
        for node in &field.nodes {
            rec.r_min = rec.r_min.min(node.r);
            rec.r_max = rec.r_max.max(node.r);
            rec.grad_phi_max = rec.grad_phi_max.max(node.grad_phi);
            rec.grad_r_max = rec.grad_r_max.max(node.grad_r());
            rec.u_min = rec.u_min.min(node.u);
            let sk = node.sigma(k);
            let cap = ctx.eval(node.r)?.f * sk.max(0.0).powf(alpha);
            rec.phi_min = rec.phi_min.min(cap);
            rec.phi_max = rec.phi_max.max(cap);
            rec.cone_margin = rec.cone_margin.min(cone_margin(&node.kappa, k));
            for &kap in node.kappa.as_slice() {
                rec.a_max = rec.a_max.max(kap.abs());
            }
        }
        rec.osc = rec.r_max - rec.r_min;
        Ok(rec)
    }

    fn values(&self) -> [f64; 12] {
        [
            self.tau,
            self.r_min,
            self.r_max,
            self.osc,
            self.grad_phi_max,
            self.grad_r_max,
            self.u_min,
            self.phi_min,
            self.phi_max,
            self.cone_margin,
            self.a_max,
            self.dt,
        ]
    }

    fn from_values(v: &[f64]) -> Self {
        DiagnosticRecord {
            tau: v[0],
            r_min: v[1],
            r_max: v[2],
            osc: v[3],
            grad_phi_max: v[4],
            grad_r_max: v[5],
            u_min: v[6],
            phi_min: v[7],
            phi_max: v[8],
            cone_margin: v[9],
            a_max: v[10],
            dt: v[11],
        }
    }
}

/// Time series of records with strictly increasing tau.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiagnosticsSeries {
    records: Vec<DiagnosticRecord>,
}

impl DiagnosticsSeries {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a record; records that do not advance tau are ignored.
    pub fn push(&mut self, rec: DiagnosticRecord) -> bool {
        if self.records.last().is_some_and(|last| rec.tau <= last.tau) {
            return false;
        }
        self.records.push(rec);
        true
    }

    pub fn records(&self) -> &[DiagnosticRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&DiagnosticRecord> {
        self.records.last()
    }

    /// (tau, value) pairs for one column.
    pub fn column(&self, f: impl Fn(&DiagnosticRecord) -> f64) -> Vec<(f64, f64)> {
        self.records.iter().map(|r| (r.tau, f(r))).collect()
    }

    /// Records whose tau lies in the last `fraction` of the recorded span.
    pub fn tail(&self, fraction: f64) -> &[DiagnosticRecord] {
        let (Some(first), Some(last)) = (self.records.first(), self.records.last()) else {
            return &[];
        };
        let start = last.tau - fraction * (last.tau - first.tau);
        let idx = self.records.partition_point(|r| r.tau < start);
        &self.records[idx..]
    }

    pub fn to_csv(&self) -> String {
        let mut out = COLUMNS.join(",");
        out.push('\n');
        for rec in &self.records {
            let row: Vec<String> = rec.values().iter().map(|v| fmt_f64(*v)).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == COLUMNS.join(",") => {}
            _ => {
                return Err(Error::Syntax {
                    line: 1,
                    msg: "unexpected diagnostics header".into(),
                })
            }
        }
        let mut series = Self::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let vals: std::result::Result<Vec<f64>, _> = line.split(',').map(|f| f.trim().parse::<f64>()).collect();
            let vals = vals.map_err(|e| Error::Syntax {
                line: i + 1,
                msg: e.to_string(),
            })?;
            if vals.len() != COLUMNS.len() {
                return Err(Error::Syntax {
                    line: i + 1,
                    msg: format!("expected {} columns", COLUMNS.len()),
                });
            }
            series.records.push(DiagnosticRecord::from_values(&vals));
        }
        Ok(series)
    }

    /// Largest increase of a column between consecutive records.
    pub fn max_increase(&self, f: impl Fn(&DiagnosticRecord) -> f64) -> f64 {
        self.records
            .windows(2)
            .map(|w| f(&w[1]) - f(&w[0]))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Worst value of osc - pi * max|grad r| (must stay <= 0).
    pub fn oscillation_chain_excess(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.osc - PI * r.grad_r_max)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Exponential fit of a column over the last half of the records that are
    /// above the roundoff floor `FIT_FLOOR`.
    pub fn tail_fit(&self, f: impl Fn(&DiagnosticRecord) -> f64) -> Result<DecayFit> {
        let pts: Vec<(f64, f64)> = self.column(f).into_iter().filter(|p| p.1 > FIT_FLOOR).collect();
        let (Some(first), Some(last)) = (pts.first(), pts.last()) else {
            return Err(Error::TooFewPoints(0));
        };
        let mid = first.0 + 0.5 * (last.0 - first.0);
        fit_exponential(&pts, (mid, last.0))
    }

    /// Lower-floor monitor: the minimum of a column over the last half must be
    /// at least `factor` times its minimum over the third quarter.
    pub fn tail_floor_holds(&self, f: impl Fn(&DiagnosticRecord) -> f64, factor: f64) -> bool {
        let (Some(first), Some(last)) = (self.records.first(), self.records.last()) else {
            return true;
        };
        let span = last.tau - first.tau;
        let q3 = |r: &&DiagnosticRecord| {
            r.tau >= first.tau + 0.5 * span && r.tau < first.tau + 0.75 * span
        };
        let third = self.records.iter().filter(q3).map(&f).fold(f64::INFINITY, f64::min);
        let tail = self.tail(0.5).iter().map(&f).fold(f64::INFINITY, f64::min);
        !third.is_finite() || tail >= factor * third
    }

    /// Min and max of Phi over the last half of the run.
    pub fn phi_window(&self) -> (f64, f64) {
        let tail = self.tail(0.5);
        (
            tail.iter().map(|r| r.phi_min).fold(f64::INFINITY, f64::min),
            tail.iter().map(|r| r.phi_max).fold(f64::NEG_INFINITY, f64::max),
        )
    }
}

/// Log-linear least-squares fit value ~ amplitude * exp(rate * tau).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub rate: f64,
    pub amplitude: f64,
    /// RMS of the log residuals.
    pub residual: f64,
    pub window: (f64, f64),
}

/// Fits log(value) = log(amplitude) + rate * tau over points with tau in `window`.
pub fn fit_exponential(series: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|(t, _)| *t >= window.0 && *t <= window.1)
        .collect();
    if pts.len() < 10 {
        return Err(Error::TooFewPoints(pts.len()));
    }
    if let Some(&(tau, value)) = pts.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::NonPositiveValue { tau, value });
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, v) in &pts {
        sxy += (t - mt) * (v.ln() - my);
        sxx += (t - mt) * (t - mt);
    }
    let rate = sxy / sxx;
    let intercept = my - rate * mt;
    let residual = (pts
        .iter()
        .map(|(t, v)| (v.ln() - intercept - rate * t).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(DecayFit {
        rate,
        amplitude: intercept.exp(),
        residual,
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        (0..=50).map(|i| i as f64 * 0.1).map(|t| (t, f(t))).collect()
    }

    #[test]
    fn exact_exponential() {
        let fit = fit_exponential(&sample(|t| (-2.0 * t).exp()), (0.0, 5.0)).unwrap();
        assert!((fit.rate + 2.0).abs() < 1e-9);
        assert!(fit.residual < 1e-9);
        assert!((fit.amplitude - 1.0).abs() < 1e-9);
    }

    #[test]
    fn constant_series_has_zero_rate() {
        let fit = fit_exponential(&sample(|_| 3.0), (0.0, 5.0)).unwrap();
        assert!(fit.rate.abs() < 1e-12);
    }

    #[test]
    fn perturbed_exponential() {
        let fit = fit_exponential(&sample(|t| 3.0 * (-0.7 * t).exp() * (1.0 + 0.01 * t.sin())), (0.0, 5.0)).unwrap();
        assert!((fit.rate + 0.7).abs() < 0.02);
    }

    #[test]
    fn shift_changes_amplitude_only() {
        let data = sample(|t| 2.0 * (-1.3 * t).exp());
        let a = fit_exponential(&data, (0.0, 5.0)).unwrap();
        let b = fit_exponential(&data, (1.0, 5.0)).unwrap();
        assert!((a.rate - b.rate).abs() < 1e-9);
        assert!((a.amplitude - b.amplitude).abs() < 1e-9);
        let shifted: Vec<(f64, f64)> = data.iter().map(|(t, v)| (t - 1.0, *v)).collect();
        let c = fit_exponential(&shifted, (-1.0, 4.0)).unwrap();
        assert!((c.rate - a.rate).abs() < 1e-9);
        assert!((c.amplitude - 2.0 * (-1.3f64).exp()).abs() < 1e-9);
        assert!((c.amplitude - a.amplitude).abs() > 0.1);
    }

    #[test]
    fn fit_errors() {
        assert!(matches!(fit_exponential(&sample(|t| t), (0.0, 5.0)), Err(Error::NonPositiveValue { .. })));
        assert!(matches!(fit_exponential(&sample(|_| 1.0), (0.0, 0.5)), Err(Error::TooFewPoints(6))));
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let mut s = DiagnosticsSeries::new();
        for i in 0..5 {
            let t = i as f64 / 3.0;
            s.push(DiagnosticRecord::from_values(&[t, 0.1 + t, 1.0 / 7.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 1e-5]));
        }
        assert!(!s.push(s.records()[2]));
        assert_eq!(DiagnosticsSeries::from_csv(&s.to_csv()).unwrap(), s);
    }
}
