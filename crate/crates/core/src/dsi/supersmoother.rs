//! Friedman's variable-span supersmoother on an evenly spaced series.
//!
//! Running-line smooths are computed at every candidate span together with
//! their leave-one-out residuals. The residuals are smoothed with the
//! midrange span, the best span is picked per point, that choice is smoothed
//! again, and the output interpolates between the two smooths whose spans
//! bracket it. A last pass with the smallest span cleans up the blend.

use super::{validate_spans, DsiError, DsiWarning};

#[derive(Debug, Clone, PartialEq)]
pub struct Smoothed {
    pub values: Vec<f64>,
    pub warning: Option<DsiWarning>,
}

fn half_window(span: f64, n: usize) -> usize {
    ((0.5 * span * n as f64 + 0.5) as usize).max(2)
}

/// Window of the smallest span; shorter series are returned unchanged.
pub fn minimum_window(spans: &[f64], n: usize) -> usize {
    let smallest = spans.iter().copied().fold(f64::INFINITY, f64::min);
    2 * half_window(smallest, n) + 1
}

/// Running window of the accumulated moments used by the updating formulas.
#[derive(Default)]
struct Moments {
    count: f64,
    xm: f64,
    ym: f64,
    var: f64,
    cvar: f64,
}

impl Moments {
    fn add(&mut self, x: f64, y: f64) {
        let before = self.count;
        self.count += 1.0;
        self.xm = (before * self.xm + x) / self.count;
        self.ym = (before * self.ym + y) / self.count;
        if before > 0.0 {
            let t = self.count * (x - self.xm) / before;
            self.var += t * (x - self.xm);
            self.cvar += t * (y - self.ym);
        }
    }

    fn remove(&mut self, x: f64, y: f64) {
        let before = self.count;
        self.count -= 1.0;
        if self.count > 0.0 {
            let t = before * (x - self.xm) / self.count;
            self.var -= t * (x - self.xm);
            self.cvar -= t * (y - self.ym);
            self.xm = (before * self.xm - x) / self.count;
            self.ym = (before * self.ym - y) / self.count;
        }
    }
}

/// Local linear fit over a window of `2 * half_window + 1` points (clipped to
/// the series, frozen at the ends). With `cv`, also returns the absolute
/// leave-one-out residuals.
fn running_lines(y: &[f64], span: f64, cv: bool) -> (Vec<f64>, Vec<f64>) {
    let n = y.len();
    let x = |i: usize| i as f64;
    let ibw = half_window(span, n);
    let initial = (2 * ibw + 1).min(n);
    let small = (1e-3 * (n - 1) as f64).powi(2);

    let mut m = Moments::default();
    for i in 0..initial {
        m.add(x(i), y[i]);
    }
    let mut smo = vec![0.0; n];
    let mut resid = if cv { vec![0.0; n] } else { Vec::new() };
    for j in 0..n {
        if j > ibw && j + ibw < n {
            let out = j - ibw - 1;
            let inn = j + ibw;
            m.remove(x(out), y[out]);
            m.add(x(inn), y[inn]);
        }
        let slope = if m.var > small { m.cvar / m.var } else { 0.0 };
        smo[j] = slope * (x(j) - m.xm) + m.ym;
        if cv {
            let mut h = 1.0 / m.count;
            if m.var > small {
                h += (x(j) - m.xm).powi(2) / m.var;
            }
            let a = 1.0 - h;
            resid[j] = if a > 0.0 {
                (y[j] - smo[j]).abs() / a
            } else if j > 0 {
                resid[j - 1]
            } else {
                0.0
            };
        }
    }
    (smo, resid)
}

pub fn supersmooth(series: &[f64], spans: &[f64]) -> Result<Smoothed, DsiError> {
    validate_spans(spans)?;
    let n = series.len();
    let window = minimum_window(spans, n);
    if n < window {
        return Ok(Smoothed {
            values: series.to_vec(),
            warning: Some(DsiWarning::SeriesTooShort { len: n, window }),
        });
    }
    let mut spans = spans.to_vec();
    spans.sort_by(f64::total_cmp);
    spans.dedup();
    let k = spans.len();
    let tweeter = spans[0];
    if k == 1 {
        return Ok(Smoothed { values: running_lines(series, tweeter, false).0, warning: None });
    }
    let woofer = spans[k - 1];
    // upper median for even counts; Friedman's midrange for three spans
    let mid = spans[k / 2];

    let mut smooths = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for &s in &spans {
        let (smo, cv) = running_lines(series, s, true);
        smooths.push(smo);
        residuals.push(running_lines(&cv, mid, false).0);
    }

    let chosen: Vec<f64> = (0..n)
        .map(|j| {
            let mut best = 0;
            for i in 1..k {
                if residuals[i][j] < residuals[best][j] {
                    best = i;
                }
            }
            spans[best]
        })
        .collect();
    let chosen = running_lines(&chosen, mid, false).0;

    let blended: Vec<f64> = (0..n)
        .map(|j| {
            let s = chosen[j].clamp(tweeter, woofer);
            let hi = spans.iter().position(|&t| t >= s).unwrap_or(k - 1).max(1);
            let lo = hi - 1;
            let f = (s - spans[lo]) / (spans[hi] - spans[lo]);
            (1.0 - f) * smooths[lo][j] + f * smooths[hi][j]
        })
        .collect();
    Ok(Smoothed { values: running_lines(&blended, tweeter, false).0, warning: None })
}
