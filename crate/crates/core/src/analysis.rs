//! Reductions of time series: peaks, late-time plateaus, Mpemba crossings,
//! early-growth classification, and log-log / linear fits.

use crate::error::{Error, Result};

/// Minimum number of samples a late-time window must contain.
pub const MIN_WINDOW_SAMPLES: usize = 10;
/// Default number of consecutive reversed samples that confirm a crossing.
pub const DEFAULT_MIN_PERSISTENCE: usize = 3;

/// Samples `(t_k, v_k)` with strictly increasing times.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidSeries(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidSeries("times must be strictly increasing".into()));
        }
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> TimeSeries {
        TimeSeries {
            times: self.times.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Global maximum `(t_max, v_max)`; the earliest sample wins ties.
pub fn find_peak(series: &TimeSeries) -> Result<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for (&t, &v) in series.times.iter().zip(&series.values) {
        match best {
            Some((_, bv)) if v <= bv => {}
            _ => best = Some((t, v)),
        }
    }
    best.ok_or_else(|| Error::InvalidSeries("cannot take the peak of an empty series".into()))
}

/// Mean and (population) standard deviation over samples with
/// `t ∈ [t1, t2]`.
pub fn late_time_average(series: &TimeSeries, window: (f64, f64)) -> Result<(f64, f64)> {
    let (t1, t2) = window;
    let vals: Vec<f64> = series
        .times
        .iter()
        .zip(&series.values)
        .filter(|(&t, _)| t >= t1 && t <= t2)
        .map(|(_, &v)| v)
        .collect();
    if vals.len() < MIN_WINDOW_SAMPLES {
        return Err(Error::TooFewSamples {
            t1,
            t2,
            found: vals.len(),
            required: MIN_WINDOW_SAMPLES,
        });
    }
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok((mean, var.sqrt()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossingReport {
    pub crossed: bool,
    /// Linearly interpolated time of the first confirmed crossing.
    pub t_cross: Option<f64>,
    /// Consecutive reversed samples following the crossing (for a confirmed
    /// crossing), or the longest unconfirmed run otherwise.
    pub persistence: usize,
}

/// Detects the more-asymmetric curve dropping below the less-asymmetric one.
///
/// The ordering is read from the first sample where the curves differ. If
/// `more_tilted` does not start above `less_tilted` there is nothing to
/// cross. Otherwise the first sign reversal of `more − less` that holds for
/// at least `min_persistence` consecutive samples is reported.
pub fn detect_crossing(
    less_tilted: &TimeSeries,
    more_tilted: &TimeSeries,
    min_persistence: usize,
) -> Result<CrossingReport> {
    if less_tilted.times != more_tilted.times {
        return Err(Error::InvalidSeries(
            "crossing detection needs identical time grids".into(),
        ));
    }
    let min_persistence = min_persistence.max(1);
    let t = &less_tilted.times;
    let diff: Vec<f64> = more_tilted
        .values
        .iter()
        .zip(&less_tilted.values)
        .map(|(m, l)| m - l)
        .collect();
    let none = CrossingReport {
        crossed: false,
        t_cross: None,
        persistence: 0,
    };
    let Some(first) = diff.iter().position(|&d| d != 0.0) else {
        return Ok(none);
    };
    if diff[first] < 0.0 {
        return Ok(none);
    }
    let mut last_pos = first;
    let mut longest = 0;
    let mut k = first + 1;
    while k < diff.len() {
        if diff[k] > 0.0 {
            last_pos = k;
            k += 1;
            continue;
        }
        if diff[k] == 0.0 {
            k += 1;
            continue;
        }
        let run = diff[k..].iter().take_while(|&&d| d < 0.0).count();
        if run >= min_persistence {
            // interpolate between the last positive sample and the first
            // negative one
            let (d0, d1) = (diff[last_pos], diff[k]);
            let (t0, t1) = (t[last_pos], t[k]);
            let tc = t0 + (t1 - t0) * d0 / (d0 - d1);
            return Ok(CrossingReport {
                crossed: true,
                t_cross: Some(tc),
                persistence: run,
            });
        }
        longest = longest.max(run);
        k += run;
    }
    Ok(CrossingReport {
        persistence: longest,
        ..none
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EarlyGrowth {
    /// The series rises above its initial value within the horizon.
    Exceeds,
    /// The series never rises above its initial value within the horizon.
    StaysBelow,
}

/// Absolute part of the early-growth tolerance.
pub const GROWTH_ABS_TOL: f64 = 1e-9;
/// Relative part, scaled by the range of the series inside the horizon.
pub const GROWTH_REL_TOL: f64 = 1e-6;

/// Whether `max_{0 < t ≤ horizon} v(t) > v(0) + tol`.
///
/// The tolerance is `1e−9 + 1e−6 · (max − min)` over the horizon, which
/// depends only on differences of values and so is unchanged by a constant
/// shift of the series.
pub fn classify_early_growth(series: &TimeSeries, horizon: f64) -> Result<EarlyGrowth> {
    if series.is_empty() || series.times[0] != 0.0 {
        return Err(Error::InvalidSeries(
            "early-growth classification needs a sample at t = 0".into(),
        ));
    }
    let t_end = *series.times.last().unwrap_or(&0.0);
    if !(horizon > 0.0 && horizon <= t_end) {
        return Err(Error::InvalidSeries(format!(
            "horizon {horizon} is outside (0, {t_end}]"
        )));
    }
    let v0 = series.values[0];
    let window: Vec<f64> = series
        .times
        .iter()
        .zip(&series.values)
        .filter(|(&t, _)| t <= horizon)
        .map(|(_, &v)| v)
        .collect();
    let hi = window.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = window.iter().cloned().fold(f64::INFINITY, f64::min);
    let tol = GROWTH_ABS_TOL + GROWTH_REL_TOL * (hi - lo);
    let rises = window[1..].iter().any(|&v| v - v0 > tol);
    Ok(if rises {
        EarlyGrowth::Exceeds
    } else {
        EarlyGrowth::StaysBelow
    })
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear_fit_extrapolate(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::DegenerateFit(format!(
            "{} abscissae but {} ordinates",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::DegenerateFit("a line needs at least two points".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all abscissae are equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Fits `y = a·x^b` by least squares on `(ln x, ln y)`; returns `(a, b)`.
pub fn power_law_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() < 3 {
        return Err(Error::DegenerateFit("a power law fit needs at least three points".into()));
    }
    if x.iter().chain(y).any(|&v| !(v > 0.0)) {
        return Err(Error::DegenerateFit("power law fit needs positive data".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (b, ln_a) = linear_fit_extrapolate(&lx, &ly)?;
    Ok((ln_a.exp(), b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(times: &[f64], values: &[f64]) -> TimeSeries {
        TimeSeries::new(times.to_vec(), values.to_vec()).unwrap()
    }

    #[test]
    fn series_validation() {
        assert!(TimeSeries::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(TimeSeries::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn peaks() {
        let up = ts(&[0.0, 1.0, 2.0], &[0.1, 0.2, 0.3]);
        assert_eq!(find_peak(&up).unwrap(), (2.0, 0.3));
        let s = ts(&[0.0, 1.0, 2.0, 3.0], &[0.0, 1.0, 0.3, 0.3]);
        assert_eq!(find_peak(&s).unwrap(), (1.0, 1.0));
        let tie = ts(&[0.0, 1.0, 2.0], &[0.5, 0.2, 0.5]);
        assert_eq!(find_peak(&tie).unwrap(), (0.0, 0.5));
        assert!(find_peak(&ts(&[], &[])).is_err());
    }

    #[test]
    fn late_averages() {
        let times: Vec<f64> = (0..100).map(|k| k as f64).collect();
        let c = ts(&times, &vec![0.7; 100]);
        let (m, s) = late_time_average(&c, (10.0, 90.0)).unwrap();
        assert!((m - 0.7).abs() < 1e-15 && s < 1e-15);
        assert!(matches!(
            late_time_average(&c, (10.0, 15.0)),
            Err(Error::TooFewSamples { found: 6, .. })
        ));

        let times: Vec<f64> = (0..20000).map(|k| k as f64 * 0.05).collect();
        let vals: Vec<f64> = times.iter().map(|t| 1.0 + 0.1 * t.sin()).collect();
        let (m, _) = late_time_average(&ts(&times, &vals), (100.0, 999.0)).unwrap();
        assert!((m - 1.0).abs() < 0.01);
    }

    #[test]
    fn crossings() {
        let times: Vec<f64> = (0..=200).map(|k| k as f64 * 0.01).collect();
        let one = ts(&times, &vec![1.0; times.len()]);
        let two = ts(&times, &vec![2.0; times.len()]);
        assert!(!detect_crossing(&one, &two, 3).unwrap().crossed);

        let falling = ts(&times, &times.iter().map(|t| 2.0 - t).collect::<Vec<_>>());
        let r = detect_crossing(&one, &falling, 3).unwrap();
        assert!(r.crossed);
        assert!((r.t_cross.unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(r.persistence, 100);
        // the reversed orientation starts below and cannot cross
        assert!(!detect_crossing(&falling, &one, 3).unwrap().crossed);

        let other = ts(&[0.0, 1.0], &[0.0, 1.0]);
        assert!(detect_crossing(&one, &other, 3).is_err());
    }

    #[test]
    fn brief_dips_are_ignored() {
        let t: Vec<f64> = (0..8).map(|k| k as f64).collect();
        let less = ts(&t, &[0.0; 8]);
        let more = ts(&t, &[1.0, 0.5, -0.1, 0.2, 0.3, -0.1, -0.2, -0.3]);
        let r = detect_crossing(&less, &more, 3).unwrap();
        assert!(r.crossed);
        assert_eq!(r.persistence, 3);
        // interpolated between t = 4 (0.3) and t = 5 (−0.1)
        assert!((r.t_cross.unwrap() - 4.75).abs() < 1e-12);
        let r = detect_crossing(&less, &more, 4).unwrap();
        assert!(!r.crossed);
        assert_eq!(r.persistence, 3);
    }

    #[test]
    fn growth_classes() {
        let t = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(
            classify_early_growth(&ts(&t, &[1.0, 0.9, 0.8, 0.7]), 3.0).unwrap(),
            EarlyGrowth::StaysBelow
        );
        assert_eq!(
            classify_early_growth(&ts(&t, &[0.0, 0.1, 0.2, 0.1]), 2.0).unwrap(),
            EarlyGrowth::Exceeds
        );
        // growth after the horizon does not count
        assert_eq!(
            classify_early_growth(&ts(&t, &[1.0, 0.9, 0.8, 2.0]), 2.0).unwrap(),
            EarlyGrowth::StaysBelow
        );
        assert!(classify_early_growth(&ts(&[1.0, 2.0], &[0.0, 0.0]), 2.0).is_err());
        assert!(classify_early_growth(&ts(&t, &[0.0; 4]), 5.0).is_err());
    }

    #[test]
    fn fits() {
        let x = [0.5, 1.0, 2.0, 7.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 2.0 * v.sqrt()).collect();
        let (a, b) = power_law_fit(&x, &y).unwrap();
        assert!((a - 2.0).abs() < 1e-10 && (b - 0.5).abs() < 1e-10);
        let (_, b) = power_law_fit(&x, &[3.0; 4]).unwrap();
        assert!(b.abs() < 1e-12);
        assert!(power_law_fit(&x, &[1.0, -1.0, 1.0, 1.0]).is_err());
        assert!(power_law_fit(&[1.0, 2.0], &[1.0, 2.0]).is_err());

        let (s, c) = linear_fit_extrapolate(&[0.0, 1.0, 2.0, 5.0], &[1.0, 4.0, 7.0, 16.0]).unwrap();
        assert_eq!((s, c), (3.0, 1.0));
        let (s, c) = linear_fit_extrapolate(&[1.0, 3.0], &[2.0, 6.0]).unwrap();
        assert!((s - 2.0).abs() < 1e-15 && c.abs() < 1e-15);
        assert!(linear_fit_extrapolate(&[2.0, 2.0], &[1.0, 3.0]).is_err());
        assert!(linear_fit_extrapolate(&[2.0], &[1.0]).is_err());
    }
}
