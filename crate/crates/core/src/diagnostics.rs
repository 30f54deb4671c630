//! Scalar monitors of a field and analysis of diagnostic time series:
//! norm growth fits, peak tracking, size-estimate checks, and the
//! max-then-min signature of optimal dispersion matching.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{forward, linf_norm, Grid, RealField};

/// One row of the diagnostic record of a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSample {
    pub t: f64,
    /// `L^2` norm (Sobolev index 0).
    pub h0: f64,
    /// `H^1` norm.
    pub h1: f64,
    /// `H^2` norm.
    pub h2: f64,
    /// Max magnitude on the grid.
    pub linf: f64,
    /// `int U dx`.
    pub mass: f64,
    /// `int U^2 dx`.
    pub momentum: f64,
    /// Parabola-refined location of the largest value.
    pub peak_x: f64,
    /// Refined height at that location.
    pub peak_value: f64,
}

impl DiagnosticsSample {
    /// Norm of Sobolev index `s` in `{0, 1, 2}`; anything else is `linf`.
    pub fn sobolev(&self, s: u32) -> f64 {
        match s {
            0 => self.h0,
            1 => self.h1,
            2 => self.h2,
            _ => self.linf,
        }
    }
}

/// `H^0`, `H^1`, `H^2` norms from a single transform.
///
/// Matches `spectral::sobolev_norm` exactly, including the omission of the
/// odd-derivative Nyquist contribution.
fn sobolev_triple(field: &RealField) -> (f64, f64, f64) {
    let coeffs = forward(field);
    let grid = field.grid();
    let nyquist = grid.len() / 2;
    let inv_2l = 1.0 / (2.0 * grid.half_width());
    let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for (j, (c, &xi)) in coeffs.coeffs().iter().zip(grid.wavenumbers()).enumerate() {
        let w = c.norm_sqr() * inv_2l;
        let xi2 = if j == nyquist { 0.0 } else { xi * xi };
        let xi4 = (xi * xi) * (xi * xi);
        s0 += w;
        s1 += w * xi2;
        s2 += w * xi4;
    }
    (s0.sqrt(), (s0 + s1).sqrt(), (s0 + s1 + s2).sqrt())
}

/// Largest value of `values` (or of `|values|`), refined by fitting a
/// parabola through the three neighboring samples, with periodic wrap.
fn peak_of_values(grid: &Grid, values: &[f64], on_abs: bool) -> (f64, f64) {
    let n = values.len();
    let pick = |i: usize| {
        if on_abs {
            values[i].abs()
        } else {
            values[i]
        }
    };
    let mut i_max = 0;
    let mut y_max = pick(0);
    for i in 1..n {
        let y = pick(i);
        if y > y_max {
            y_max = y;
            i_max = i;
        }
    }
    let y0 = y_max;
    let ym = pick((i_max + n - 1) % n);
    let yp = pick((i_max + 1) % n);
    let denom = yp - 2.0 * y0 + ym;
    let (mut delta, mut value) = (0.0, y0);
    if denom < 0.0 {
        delta = (ym - yp) / (2.0 * denom);
        delta = delta.clamp(-0.5, 0.5);
        value = y0 - (yp - ym) * (yp - ym) / (8.0 * denom);
    }
    let l = grid.half_width();
    let x = grid.points()[i_max] + delta * grid.spacing();
    let x = (x + l).rem_euclid(2.0 * l) - l;
    (x, value)
}

/// All monitors of a single field at time `t`.
pub fn field_sample(t: f64, field: &RealField) -> DiagnosticsSample {
    let (h0, h1, h2) = sobolev_triple(field);
    let dx = field.grid().spacing();
    let (mut mass, mut momentum) = (0.0, 0.0);
    for &v in field.values() {
        mass += v;
        momentum += v * v;
    }
    let (peak_x, peak_value) = peak_of_values(field.grid(), field.values(), false);
    DiagnosticsSample {
        t,
        h0,
        h1,
        h2,
        linf: linf_norm(field),
        mass: mass * dx,
        momentum: momentum * dx,
        peak_x,
        peak_value,
    }
}

/// Monitors of the difference `u - v`; the peak columns describe `|u - v|`.
pub fn distance_sample(t: f64, u: &RealField, v: &RealField) -> Result<DiagnosticsSample> {
    if u.grid() != v.grid() {
        return Err(Error::GridMismatch);
    }
    let values: Vec<f64> = u
        .values()
        .iter()
        .zip(v.values())
        .map(|(&a, &b)| a - b)
        .collect();
    let diff = RealField::from_raw(u.grid(), values);
    let (h0, h1, h2) = sobolev_triple(&diff);
    let dx = diff.grid().spacing();
    let (mut mass, mut momentum) = (0.0, 0.0);
    for &v in diff.values() {
        mass += v;
        momentum += v * v;
    }
    let (peak_x, peak_value) = peak_of_values(diff.grid(), diff.values(), true);
    Ok(DiagnosticsSample {
        t,
        h0,
        h1,
        h2,
        linf: linf_norm(&diff),
        mass: mass * dx,
        momentum: momentum * dx,
        peak_x,
        peak_value,
    })
}

/// Ordinary least squares line through `(x, y)` pairs.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; a constant series fits perfectly (1.0).
    pub r_squared: f64,
    pub n: usize,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "linear fit needs at least 2 points, got {n}"
        )));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 0.0 {
        return Err(Error::InvalidParameter(
            "linear fit needs at least two distinct abscissas".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let (mut ss_res, mut ss_tot) = (0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - (slope * x + intercept);
        ss_res += r * r;
        ss_tot += (y - my) * (y - my);
    }
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
        n,
    })
}

/// Least-squares growth rates of each norm channel over a time window.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GrowthFit {
    pub h0: LinearFit,
    pub h1: LinearFit,
    pub h2: LinearFit,
    pub linf: LinearFit,
    pub window: (f64, f64),
}

pub fn fit_linear_growth(
    samples: &[DiagnosticsSample],
    window: (f64, f64),
    min_samples: usize,
) -> Result<GrowthFit> {
    let need = min_samples.max(2);
    let picked: Vec<&DiagnosticsSample> = samples
        .iter()
        .filter(|s| s.t >= window.0 && s.t <= window.1)
        .collect();
    if picked.len() < need {
        return Err(Error::InsufficientSamples {
            lo: window.0,
            hi: window.1,
            need,
            got: picked.len(),
        });
    }
    let ts: Vec<f64> = picked.iter().map(|s| s.t).collect();
    let fit = |f: &dyn Fn(&DiagnosticsSample) -> f64| -> Result<LinearFit> {
        let ys: Vec<f64> = picked.iter().map(|s| f(s)).collect();
        linear_fit(&ts, &ys)
    };
    Ok(GrowthFit {
        h0: fit(&|s| s.h0)?,
        h1: fit(&|s| s.h1)?,
        h2: fit(&|s| s.h2)?,
        linf: fit(&|s| s.linf)?,
        window,
    })
}

/// Location and height of the maximum in each snapshot.
pub fn track_peak(snapshots: &[(f64, RealField)]) -> Vec<(f64, f64, f64)> {
    snapshots
        .iter()
        .map(|(t, field)| {
            let (x, v) = peak_of_values(field.grid(), field.values(), false);
            (*t, x, v)
        })
        .collect()
}

/// Remove periodic jumps from a position series so it can be fit by a line.
pub fn unwrap_positions(xs: &[f64], period: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    let mut prev_raw = f64::NAN;
    let mut prev_out = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        if i == 0 {
            out.push(x);
            prev_raw = x;
            prev_out = x;
            continue;
        }
        let mut d = x - prev_raw;
        d -= period * (d / period).round();
        prev_out += d;
        prev_raw = x;
        out.push(prev_out);
    }
    out
}

/// Speed of a tracked peak: least-squares slope of the unwrapped positions.
pub fn fit_peak_speed(ts: &[f64], xs: &[f64], period: f64) -> Result<LinearFit> {
    let unwrapped = unwrap_positions(xs, period);
    linear_fit(ts, &unwrapped)
}

/// Outcome of checking `norm(t) <= 2 norm(0)` up to a predicted horizon.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SizeReport {
    /// The bound `2 * initial_norm`.
    pub bound: f64,
    /// End of the checked window, `min(lifespan, last sample time)`.
    pub horizon: f64,
    pub passed: bool,
    /// First `(t, value)` exceeding the bound, if any.
    pub first_violation: Option<(f64, f64)>,
    pub samples_checked: usize,
    /// Largest observed `norm(t) / initial_norm` on the window.
    pub max_ratio: f64,
}

/// Check the doubling bound for the Sobolev index `s` norm over
/// `t <= min(lifespan, horizon of the data)`.
pub fn size_estimate_monitor(
    samples: &[DiagnosticsSample],
    s: u32,
    initial_norm: f64,
    lifespan: f64,
) -> SizeReport {
    let last_t = samples.last().map(|s| s.t).unwrap_or(0.0);
    let horizon = lifespan.min(last_t);
    let bound = 2.0 * initial_norm;
    let mut first_violation = None;
    let mut checked = 0;
    let mut max_ratio: f64 = 0.0;
    for sample in samples.iter().filter(|q| q.t <= horizon * (1.0 + 1e-12)) {
        checked += 1;
        let value = sample.sobolev(s);
        if initial_norm > 0.0 {
            max_ratio = max_ratio.max(value / initial_norm);
        }
        if value > bound && first_violation.is_none() {
            first_violation = Some((sample.t, value));
        }
    }
    SizeReport {
        bound,
        horizon,
        passed: checked > 0 && first_violation.is_none(),
        first_violation,
        samples_checked: checked,
        max_ratio,
    }
}

/// A rise to a clear interior maximum, a dip to a later minimum, and renewed
/// growth afterwards.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MaxThenMin {
    pub t_max: f64,
    pub y_max: f64,
    pub t_min: f64,
    pub y_min: f64,
    pub max_index: usize,
    pub min_index: usize,
}

/// Tuning knobs for [`detect_max_then_min`]; `Default` works for the
/// distance-to-soliton series produced by the dispersion sweeps.
#[derive(Clone, Copy, Debug)]
pub struct MaxMinOptions {
    /// Width of the centered moving average applied before detection.
    pub smooth_window: usize,
    /// Required drop from max to min, as a fraction of the series range.
    pub min_prominence: f64,
    /// Required rise from start to max, as a fraction of the range.
    pub min_rise: f64,
    /// Required growth after the minimum, as a fraction of the range.
    pub min_resume: f64,
}

impl Default for MaxMinOptions {
    fn default() -> Self {
        MaxMinOptions {
            smooth_window: 5,
            min_prominence: 0.10,
            min_rise: 0.02,
            min_resume: 0.02,
        }
    }
}

fn moving_average(ys: &[f64], window: usize) -> Vec<f64> {
    let w = window.max(1);
    let half = w / 2;
    let n = ys.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            ys[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

/// Detect the max-then-min signature in a series, or return `None`.
///
/// The signature is a rise from the start to a local crest, a prominent dip,
/// and renewed growth after the dip. The series is allowed to climb past the
/// crest later on (the caustic-crossing dips sit in the middle of an
/// otherwise growing record), so the crest is the running prefix maximum at
/// the dip, not the global maximum.
pub fn detect_max_then_min(ts: &[f64], ys: &[f64], opts: MaxMinOptions) -> Option<MaxThenMin> {
    if ts.len() != ys.len() || ts.len() < 5 {
        return None;
    }
    let smooth = moving_average(ys, opts.smooth_window);
    let lo = smooth.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = smooth.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    if range <= 0.0 || range.is_nan() {
        return None;
    }
    let n = smooth.len();
    // Largest smoothed value from each index to the end.
    let mut suffix_max = vec![f64::NEG_INFINITY; n];
    let mut running = f64::NEG_INFINITY;
    for j in (0..n).rev() {
        running = running.max(smooth[j]);
        suffix_max[j] = running;
    }
    // Scan dips left to right, keeping the prefix argmax as the paired
    // crest; the deepest qualifying drop wins.
    let mut crest = 0usize;
    let mut best: Option<(usize, usize, f64)> = None;
    for j in 1..n - 1 {
        if smooth[j - 1] > smooth[crest] {
            crest = j - 1;
        }
        let rise = smooth[crest] - smooth[0];
        let drop = smooth[crest] - smooth[j];
        let resume = suffix_max[j + 1] - smooth[j];
        if rise >= opts.min_rise * range
            && drop >= opts.min_prominence * range
            && resume >= opts.min_resume * range
            && best.is_none_or(|(_, _, d)| drop > d)
        {
            best = Some((crest, j, drop));
        }
    }
    let (im, imin, _) = best?;
    Some(MaxThenMin {
        t_max: ts[im],
        y_max: ys[im],
        t_min: ts[imin],
        y_min: ys[imin],
        max_index: im,
        min_index: imin,
    })
}

/// Shortest distance between two positions on a circle of the given period.
pub fn circular_distance(a: f64, b: f64, period: f64) -> f64 {
    let mut d = (a - b).rem_euclid(period);
    if d > period / 2.0 {
        d = period - d;
    }
    d
}

/// Parabola-refined local maxima with value at least `min_value`, sorted by
/// height (largest first). Neighboring-sample wiggles produce at most one
/// entry per strict ascent/descent pair.
pub fn local_maxima(field: &RealField, min_value: f64) -> Vec<(f64, f64)> {
    let v = field.values();
    let n = v.len();
    let grid = field.grid();
    let l = grid.half_width();
    let dx = grid.spacing();
    let mut out = Vec::new();
    for i in 0..n {
        let ym = v[(i + n - 1) % n];
        let y0 = v[i];
        let yp = v[(i + 1) % n];
        // Strict rise into i, non-rise out of it: plateaus yield their first
        // sample only.
        if !(y0 > ym && y0 >= yp) || y0 < min_value {
            continue;
        }
        let denom = yp - 2.0 * y0 + ym;
        let (mut delta, mut value) = (0.0, y0);
        if denom < 0.0 {
            delta = ((ym - yp) / (2.0 * denom)).clamp(-0.5, 0.5);
            value = y0 - (yp - ym) * (yp - ym) / (8.0 * denom);
        }
        let x = (grid.points()[i] + delta * dx + l).rem_euclid(2.0 * l) - l;
        out.push((x, value));
    }
    out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    out
}

/// Separation of the two tallest local maxima, or `None` when fewer than two
/// stand above `min_value` (e.g. while two humps are merged into one).
pub fn two_peak_separation(field: &RealField, min_value: f64) -> Option<f64> {
    let peaks = local_maxima(field, min_value);
    if peaks.len() < 2 {
        return None;
    }
    let period = 2.0 * field.grid().half_width();
    Some(circular_distance(peaks[0].0, peaks[1].0, period))
}

/// Collision instant from a separation series: the midpoint of the first
/// merged (`None`) stretch, or the time of minimum separation when the humps
/// never fully merge. `None` if the series never dips.
pub fn collision_time(series: &[(f64, Option<f64>)]) -> Option<f64> {
    // A merged stretch wins outright.
    let mut gap_start = None;
    for (i, (t, sep)) in series.iter().enumerate() {
        match (sep, gap_start) {
            (None, None) => gap_start = Some(*t),
            (Some(_), Some(t0)) => {
                let t_prev = series[i - 1].0;
                return Some(0.5 * (t0 + t_prev));
            }
            _ => {}
        }
    }
    if let Some(t0) = gap_start {
        // Merged through the end of the record.
        return Some(0.5 * (t0 + series.last().unwrap().0));
    }
    let (mut best_t, mut best_sep) = (f64::NAN, f64::INFINITY);
    for &(t, sep) in series {
        if let Some(s) = sep {
            if s < best_sep {
                best_sep = s;
                best_t = t;
            }
        }
    }
    // A minimum only counts if the separation actually dips below its
    // endpoints; a monotone series has no collision.
    let first = series.first().and_then(|p| p.1)?;
    let last = series.last().and_then(|p| p.1)?;
    if best_sep < 0.9 * first.min(last) {
        Some(best_t)
    } else {
        None
    }
}

/// Slopes of the head and tail of a series, for plateau detection.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PlateauCheck {
    pub initial_slope: f64,
    pub final_slope: f64,
    /// `|final| / |initial|`; zero initial slope gives 0 or infinity.
    pub ratio: f64,
}

/// Fit lines through the first and last quarters (by sample count).
pub fn plateau_slopes(ts: &[f64], ys: &[f64]) -> Result<PlateauCheck> {
    if ts.len() != ys.len() {
        return Err(Error::LengthMismatch {
            expected: ts.len(),
            got: ys.len(),
        });
    }
    let n = ts.len();
    if n < 8 {
        return Err(Error::InvalidParameter(format!(
            "plateau check needs at least 8 samples, got {n}"
        )));
    }
    let q = (n / 4).max(2);
    let head = linear_fit(&ts[..q], &ys[..q])?;
    let tail = linear_fit(&ts[n - q..], &ys[n - q..])?;
    let ratio = if head.slope != 0.0 {
        (tail.slope / head.slope).abs()
    } else if tail.slope == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(PlateauCheck {
        initial_slope: head.slope,
        final_slope: tail.slope,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{sobolev_norm, Grid};

    fn bump(grid: &Grid, center: f64, width: f64) -> RealField {
        RealField::from_fn(grid, |x| {
            let z = (x - center) / width;
            1.0 / z.mul_add(z, 1.0).cosh()
        })
        .unwrap()
    }

    #[test]
    fn sample_norm_channels_match_the_spectral_norms() {
        let grid = Grid::new(40.0, 256).unwrap();
        let f = bump(&grid, 3.0, 2.0);
        let s = field_sample(0.0, &f);
        for (got, s_idx) in [(s.h0, 0), (s.h1, 1), (s.h2, 2)] {
            let want = sobolev_norm(&f, s_idx);
            assert!(
                (got - want).abs() <= 1e-13 * want.max(1.0),
                "H{s_idx}: {got} vs {want}"
            );
        }
        assert!(s.h0 <= s.h1 && s.h1 <= s.h2, "norm ladder must be monotone");
        assert!(
            (s.momentum - s.h0 * s.h0).abs() <= 1e-12 * s.momentum.max(1.0),
            "momentum is the squared L2 norm"
        );
    }

    #[test]
    fn peak_refinement_recovers_an_off_grid_maximum() {
        let grid = Grid::new(50.0, 256).unwrap();
        let dx = grid.spacing();
        let x_star = 5.0 + 0.3 * dx;
        let c = 0.3f64;
        let f = RealField::from_fn(&grid, |x| {
            3.0 * c / ((c.sqrt() / 2.0 * (x - x_star)).cosh().powi(2))
        })
        .unwrap();
        let s = field_sample(0.0, &f);
        assert!(
            (s.peak_x - x_star).abs() <= 0.1 * dx,
            "refined peak {} vs true {x_star} (dx = {dx})",
            s.peak_x
        );
        assert!(s.peak_value >= s.linf - 1e-12, "vertex height >= grid max");
        assert!(
            (s.peak_value - 3.0 * c).abs() <= 1e-3 * c,
            "vertex height {} vs amplitude {}",
            s.peak_value,
            3.0 * c
        );
    }

    #[test]
    fn peak_location_wraps_at_the_seam() {
        let grid = Grid::new(50.0, 256).unwrap();
        let f = bump(&grid, -50.0, 3.0);
        let s = field_sample(0.0, &f);
        let l = grid.half_width();
        assert!(s.peak_x >= -l && s.peak_x < l, "wrapped into the box");
        let dist = {
            let d = (s.peak_x - (-l) + l).rem_euclid(2.0 * l) - l;
            d.abs()
        };
        assert!(
            dist <= grid.spacing(),
            "peak near the seam, got {}",
            s.peak_x
        );
    }

    #[test]
    fn distance_sample_is_symmetric_and_zero_on_equal_fields() {
        let grid = Grid::new(40.0, 128).unwrap();
        let a = bump(&grid, 0.0, 2.0);
        let b = bump(&grid, 4.0, 3.0);
        let d1 = distance_sample(1.0, &a, &b).unwrap();
        let d2 = distance_sample(1.0, &b, &a).unwrap();
        assert_eq!(d1.h0.to_bits(), d2.h0.to_bits());
        assert_eq!(d1.h2.to_bits(), d2.h2.to_bits());
        assert_eq!(d1.linf.to_bits(), d2.linf.to_bits());
        let z = distance_sample(0.0, &a, &a).unwrap();
        assert_eq!(z.h2, 0.0);
        assert_eq!(z.linf, 0.0);
    }

    #[test]
    fn distance_sample_rejects_mismatched_grids() {
        let a = bump(&Grid::new(40.0, 128).unwrap(), 0.0, 2.0);
        let b = bump(&Grid::new(40.0, 256).unwrap(), 0.0, 2.0);
        assert!(distance_sample(0.0, &a, &b).is_err());
    }

    #[test]
    fn linear_fit_is_exact_on_a_line_and_tolerates_constants() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let fit = linear_fit(&xs, &ys).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        let flat = vec![3.0; 20];
        let fit = linear_fit(&xs, &flat).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert_eq!(fit.r_squared, 1.0, "constant series is a perfect fit");
        assert!(linear_fit(&[1.0], &[2.0]).is_err(), "one point only");
        assert!(
            linear_fit(&[1.0, 1.0], &[2.0, 3.0]).is_err(),
            "degenerate abscissas"
        );
    }

    #[test]
    fn growth_fit_filters_by_window_and_reports_scarcity() {
        let samples: Vec<DiagnosticsSample> = (0..50)
            .map(|i| {
                let t = i as f64;
                DiagnosticsSample {
                    t,
                    h0: 1.0 + 0.01 * t,
                    h1: 2.0 + 0.02 * t,
                    h2: 3.0 + 0.03 * t,
                    linf: 0.5,
                    mass: 0.0,
                    momentum: 1.0,
                    peak_x: 0.0,
                    peak_value: 0.5,
                }
            })
            .collect();
        let fit = fit_linear_growth(&samples, (10.0, 30.0), 10).unwrap();
        assert!((fit.h2.slope - 0.03).abs() < 1e-12);
        assert!((fit.h0.slope - 0.01).abs() < 1e-12);
        assert_eq!(fit.h0.n, 21);
        let err = fit_linear_growth(&samples, (100.0, 200.0), 10);
        assert!(matches!(err, Err(Error::InsufficientSamples { .. })));
    }

    #[test]
    fn unwrap_bridges_periodic_jumps() {
        let xs = vec![90.0, 96.0, -98.0, -92.0];
        let un = unwrap_positions(&xs, 200.0);
        assert_eq!(un[0], 90.0);
        assert!((un[2] - 102.0).abs() < 1e-12, "wraps forward past +100");
        assert!((un[3] - 108.0).abs() < 1e-12);
    }

    #[test]
    fn peak_speed_recovers_velocity_through_the_seam() {
        let period = 200.0;
        let v = 0.8;
        let ts: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let xs: Vec<f64> = ts
            .iter()
            .map(|&t| {
                let x = 60.0 + v * t;
                (x + 100.0).rem_euclid(period) - 100.0
            })
            .collect();
        let fit = fit_peak_speed(&ts, &xs, period).unwrap();
        assert!((fit.slope - v).abs() < 1e-10, "slope {}", fit.slope);
        assert!(fit.r_squared > 0.999999);
    }

    fn flat_sample(t: f64, h2: f64) -> DiagnosticsSample {
        DiagnosticsSample {
            t,
            h0: h2 / 3.0,
            h1: h2 / 2.0,
            h2,
            linf: h2 / 4.0,
            mass: 0.0,
            momentum: 1.0,
            peak_x: 0.0,
            peak_value: h2 / 4.0,
        }
    }

    #[test]
    fn size_monitor_passes_below_the_doubling_bound_and_flags_violations() {
        let ok: Vec<_> = (0..40)
            .map(|i| flat_sample(i as f64, 1.0 + 0.01 * i as f64))
            .collect();
        let rep = size_estimate_monitor(&ok, 2, 1.0, 30.0);
        assert!(rep.passed);
        assert_eq!(rep.first_violation, None);
        assert!((rep.horizon - 30.0).abs() < 1e-12);
        assert!(rep.max_ratio <= 1.3 + 1e-12);

        let mut bad = ok.clone();
        bad[20].h2 = 2.5; // above 2 * initial at t = 20
        let rep = size_estimate_monitor(&bad, 2, 1.0, 30.0);
        assert!(!rep.passed);
        let (t, v) = rep.first_violation.unwrap();
        assert_eq!(t, 20.0);
        assert_eq!(v, 2.5);

        // Violation beyond the horizon does not count.
        let rep = size_estimate_monitor(&bad, 2, 1.0, 15.0);
        assert!(rep.passed);
    }

    #[test]
    fn max_then_min_fires_on_the_shape_it_describes() {
        let ts: Vec<f64> = (0..100).map(|i| i as f64).collect();
        // Rise to 1 at t = 30, dip to 0.4 at t = 60, rise again.
        let ys: Vec<f64> = ts
            .iter()
            .map(|&t| {
                if t <= 30.0 {
                    t / 30.0
                } else if t <= 60.0 {
                    1.0 - 0.6 * (t - 30.0) / 30.0
                } else {
                    0.4 + 0.3 * (t - 60.0) / 40.0
                }
            })
            .collect();
        let hit = detect_max_then_min(&ts, &ys, MaxMinOptions::default()).unwrap();
        assert!(
            (hit.t_max - 30.0).abs() <= 3.0,
            "max near 30: {}",
            hit.t_max
        );
        assert!(
            (hit.t_min - 60.0).abs() <= 3.0,
            "min near 60: {}",
            hit.t_min
        );
        assert!(hit.t_max < hit.t_min);
    }

    #[test]
    fn max_then_min_rejects_monotone_series() {
        let ts: Vec<f64> = (0..60).map(|i| i as f64).collect();
        let up: Vec<f64> = ts.iter().map(|&t| t * 0.1).collect();
        assert!(detect_max_then_min(&ts, &up, MaxMinOptions::default()).is_none());
        let down: Vec<f64> = ts.iter().map(|&t| 5.0 - t * 0.05).collect();
        assert!(
            detect_max_then_min(&ts, &down, MaxMinOptions::default()).is_none(),
            "pure decay has no interior max with later resumption"
        );
        let flat = vec![1.0; 60];
        assert!(detect_max_then_min(&ts, &flat, MaxMinOptions::default()).is_none());
    }

    #[test]
    fn circular_distance_takes_the_short_way_around() {
        assert_eq!(circular_distance(10.0, 30.0, 200.0), 20.0);
        assert_eq!(circular_distance(-95.0, 95.0, 200.0), 10.0);
        assert_eq!(circular_distance(50.0, 50.0, 200.0), 0.0);
    }

    #[test]
    fn local_maxima_ranks_two_bumps_and_filters_ripples() {
        let grid = Grid::new(100.0, 1024).unwrap();
        let f = RealField::from_fn(&grid, |x| {
            let b1 = 0.6 / ((0.3 * (x - 20.0)).cosh().powi(2));
            let b2 = 0.24 / ((0.2 * (x + 40.0)).cosh().powi(2));
            let ripple = 1e-3 * (0.9 * x).sin();
            b1 + b2 + ripple
        })
        .unwrap();
        let peaks = local_maxima(&f, 0.05);
        assert_eq!(peaks.len(), 2, "ripples sit below the height floor");
        assert!(
            (peaks[0].0 - 20.0).abs() < 0.3,
            "tallest at 20: {}",
            peaks[0].0
        );
        assert!(
            (peaks[1].0 + 40.0).abs() < 0.3,
            "second at -40: {}",
            peaks[1].0
        );
        assert!(peaks[0].1 > peaks[1].1);
        let sep = two_peak_separation(&f, 0.05).unwrap();
        assert!((sep - 60.0).abs() < 0.5, "separation {sep}");
    }

    #[test]
    fn merged_humps_report_no_separation() {
        let grid = Grid::new(100.0, 512).unwrap();
        let f = RealField::from_fn(&grid, |x| 0.8 / ((0.25 * x).cosh().powi(2))).unwrap();
        assert_eq!(two_peak_separation(&f, 0.1), None);
    }

    #[test]
    fn collision_time_uses_the_merged_stretch_midpoint() {
        let series: Vec<(f64, Option<f64>)> = vec![
            (0.0, Some(40.0)),
            (10.0, Some(25.0)),
            (20.0, None),
            (30.0, None),
            (40.0, Some(12.0)),
            (50.0, Some(30.0)),
        ];
        let t = collision_time(&series).unwrap();
        assert!((t - 25.0).abs() < 1e-12, "midpoint of [20, 30], got {t}");
    }

    #[test]
    fn collision_time_falls_back_to_the_closest_approach() {
        let series: Vec<(f64, Option<f64>)> = (0..20)
            .map(|i| {
                let t = i as f64 * 10.0;
                (t, Some(5.0 + (t - 100.0).abs() * 0.3))
            })
            .collect();
        let t = collision_time(&series).unwrap();
        assert!((t - 100.0).abs() < 1e-12, "dip at 100, got {t}");
        let monotone: Vec<(f64, Option<f64>)> =
            (0..20).map(|i| (i as f64, Some(10.0 + i as f64))).collect();
        assert_eq!(collision_time(&monotone), None, "no dip, no collision");
    }

    #[test]
    fn plateau_slopes_separate_transient_from_saturation() {
        let ts: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let ys: Vec<f64> = ts.iter().map(|&t| 1.0 - (-t).exp()).collect();
        let p = plateau_slopes(&ts, &ys).unwrap();
        // Mean of e^{-t} over the first quarter (t in [0, 2.5]) is about 0.37.
        assert!(p.initial_slope > 0.3, "head slope {}", p.initial_slope);
        assert!(
            p.ratio < 0.05,
            "tail slope {} should be well under the head slope {}",
            p.final_slope,
            p.initial_slope
        );
    }
}
