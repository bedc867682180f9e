// Copyright 2026 The tgrb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Decay fitting, T-gate fidelity estimation and box-plot summaries.
//!
//! Fits are keyed by the pair count n. All public fidelity estimates use
//! per-gate bases, the square root of the per-pair fit.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::fidelity::{chi00_from_fidelity, fidelity_from_contraction};

/// Projected-gradient tolerance for declaring a fit converged.
pub const GRADIENT_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 1000;
/// Weighted variance below which data are treated as flat.
pub const FLAT_VARIANCE_TOL: f64 = 1e-20;
/// Minimum total signal |A|·|p^n_min − p^n_max| for p to count as identifiable.
pub const IDENTIFIABLE_SIGNAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("need at least 3 distinct lengths, got {found}")]
    TooFewLengths { found: usize },
    #[error("invalid data point: {0}")]
    InvalidPoint(String),
    #[error(
        "no convergence after {iterations} iterations (projected gradient {gradient_norm:e}, A={a}, p={p}, B={b})"
    )]
    NoConvergence {
        iterations: usize,
        gradient_norm: f64,
        a: f64,
        p: f64,
        b: f64,
    },
}

/// Mean survival at one length, with the number of sequences behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayPoint {
    pub n: usize,
    pub mean: f64,
    pub count: usize,
    /// Standard error of the mean across sequences (0 if unknown).
    #[serde(default)]
    pub stderr: f64,
}

impl DecayPoint {
    pub fn new(n: usize, mean: f64, count: usize) -> Self {
        Self {
            n,
            mean,
            count,
            stderr: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    #[serde(rename = "A")]
    pub a: f64,
    /// Per-pair decay base.
    pub p: f64,
    #[serde(rename = "B")]
    pub b: f64,
    /// sqrt of the count-weighted mean squared residual.
    pub residual_norm: f64,
    pub per_gate_p: f64,
    pub p_identifiable: bool,
    pub iterations: usize,
}

impl DecayFit {
    pub fn value_at(&self, n: usize) -> f64 {
        self.a * self.p.powi(n as i32) + self.b
    }

    fn from_params(theta: [f64; 3], sse: f64, iterations: usize, n_min: usize, n_max: usize) -> Self {
        let [a, p, b] = theta;
        let signal = a.abs() * (p.powi(n_min as i32) - p.powi(n_max as i32)).abs();
        Self {
            a,
            p,
            b,
            residual_norm: sse.max(0.0).sqrt(),
            per_gate_p: p.sqrt(),
            p_identifiable: signal >= IDENTIFIABLE_SIGNAL_TOL,
            iterations,
        }
    }
}

/// One curve's data with normalized weights.
struct Curve {
    n: Vec<i32>,
    y: Vec<f64>,
    w: Vec<f64>,
}

/// K curves sharing the asymptote B. Parameters are laid out as
/// [A₀, p₀, A₁, p₁, …, B], all boxed to [0, 1].
struct Problem {
    curves: Vec<Curve>,
}

impl Problem {
    fn new(sets: &[&[DecayPoint]]) -> Self {
        let total: f64 = sets.iter().flat_map(|s| s.iter()).map(|p| p.count as f64).sum();
        Self {
            curves: sets
                .iter()
                .map(|s| Curve {
                    n: s.iter().map(|p| p.n as i32).collect(),
                    y: s.iter().map(|p| p.mean).collect(),
                    w: s.iter().map(|p| p.count as f64 / total).collect(),
                })
                .collect(),
        }
    }


    fn curve_sse(c: &Curve, a: f64, p: f64, b: f64) -> f64 {
        c.n.iter()
            .zip(&c.y)
            .zip(&c.w)
            .map(|((&n, &y), &w)| {
                let r = a * p.powi(n) + b - y;
                w * r * r
            })
            .sum()
    }

    fn sse(&self, t: &[f64]) -> f64 {
        let b = t[t.len() - 1];
        self.curves
            .iter()
            .enumerate()
            .map(|(k, c)| Self::curve_sse(c, t[2 * k], t[2 * k + 1], b))
            .sum()
    }

    /// Residuals √w·(f − y) and their Jacobian.
    fn linearize(&self, t: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let m: usize = self.curves.iter().map(|c| c.n.len()).sum();
        let bi = t.len() - 1;
        let mut r = DVector::zeros(m);
        let mut j = DMatrix::zeros(m, t.len());
        let mut row = 0;
        for (k, c) in self.curves.iter().enumerate() {
            let (a, p) = (t[2 * k], t[2 * k + 1]);
            for i in 0..c.n.len() {
                let (n, sw) = (c.n[i], c.w[i].sqrt());
                let pn = p.powi(n);
                let dp = if n == 0 { 0.0 } else { n as f64 * p.powi(n - 1) };
                r[row] = sw * (a * pn + t[bi] - c.y[i]);
                j[(row, 2 * k)] = sw * pn;
                j[(row, 2 * k + 1)] = sw * a * dp;
                j[(row, bi)] = sw;
                row += 1;
            }
        }
        (r, j)
    }
}

/// Best A in [0,1] for fixed p and B.
fn best_amplitude(c: &Curve, p: f64, b: f64) -> f64 {
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for ((&n, &y), &w) in c.n.iter().zip(&c.y).zip(&c.w) {
        let x = p.powi(n);
        sxx += w * x * x;
        sxy += w * x * (y - b);
    }
    if sxx > 0.0 {
        (sxy / sxx).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// Best (A, B) in [0,1]² for one curve at fixed p; convex, so the optimum is
/// interior or on an edge.
fn best_linear(c: &Curve, p: f64) -> ([f64; 3], f64) {
    let (mut sw, mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((&n, &yi), &wi) in c.n.iter().zip(&c.y).zip(&c.w) {
        let xi = p.powi(n);
        sw += wi;
        sx += wi * xi;
        sxx += wi * xi * xi;
        sy += wi * yi;
        sxy += wi * xi * yi;
    }
    let mut candidates = Vec::with_capacity(5);
    let det = sw * sxx - sx * sx;
    if det.abs() > 1e-300 {
        let a = (sw * sxy - sx * sy) / det;
        let b = (sxx * sy - sx * sxy) / det;
        if (0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b) {
            candidates.push([a, p, b]);
        }
    }
    for a in [0.0, 1.0] {
        candidates.push([a, p, ((sy - a * sx) / sw).clamp(0.0, 1.0)]);
    }
    if sxx > 0.0 {
        for b in [0.0, 1.0] {
            candidates.push([((sxy - b * sx) / sxx).clamp(0.0, 1.0), p, b]);
        }
    }
    candidates
        .into_iter()
        .map(|t| (t, Problem::curve_sse(c, t[0], t[1], t[2])))
        .min_by(|l, r| l.1.total_cmp(&r.1))
        .expect("at least two candidates")
}

fn projected_gradient(t: &[f64], g: &[f64]) -> Vec<f64> {
    t.iter()
        .zip(g)
        .map(|(&x, &gi)| if (x <= 0.0 && gi > 0.0) || (x >= 1.0 && gi < 0.0) { 0.0 } else { gi })
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

struct Polished {
    sse: f64,
    theta: Vec<f64>,
    iterations: usize,
    gradient: f64,
}

/// Box-constrained Levenberg–Marquardt on the coordinates not pinned at a
/// bound.
fn polish(problem: &Problem, start: Vec<f64>) -> Polished {
    let mut t = start;
    let mut sse = problem.sse(&t);
    let mut lambda: f64 = 1e-3;
    let mut gradient = f64::INFINITY;
    for it in 0..MAX_ITERATIONS {
        let (r, j) = problem.linearize(&t);
        let g: Vec<f64> = (j.transpose() * &r).iter().copied().collect();
        let pg = projected_gradient(&t, &g);
        gradient = norm(&pg);
        if gradient < GRADIENT_TOL {
            return Polished { sse, theta: t, iterations: it, gradient };
        }
        let free: Vec<usize> = (0..t.len()).filter(|&k| pg[k] != 0.0 || (t[k] > 0.0 && t[k] < 1.0)).collect();
        let m = r.len();
        let mut improved = false;
        while lambda < 1e20 {
            let nf = free.len();
            let mut aug = DMatrix::zeros(m + nf, nf);
            let mut rhs = DVector::zeros(m + nf);
            for i in 0..m {
                for (c, &k) in free.iter().enumerate() {
                    aug[(i, c)] = j[(i, k)];
                }
                rhs[i] = -r[i];
            }
            for (c, &k) in free.iter().enumerate() {
                aug[(m + c, c)] = lambda.sqrt() * j.column(k).norm().max(1e-12);
            }
            if let Ok(step) = aug.svd(true, true).solve(&rhs, 1e-300) {
                let mut trial = t.clone();
                for (c, &k) in free.iter().enumerate() {
                    trial[k] = (t[k] + step[c]).clamp(0.0, 1.0);
                }
                let trial_sse = problem.sse(&trial);
                if trial_sse < sse {
                    t = trial;
                    sse = trial_sse;
                    lambda = (lambda / 10.0).max(1e-12);
                    improved = true;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !improved {
            // No representable descent left: stationary up to rounding.
            return Polished { sse, theta: t, iterations: it, gradient };
        }
    }
    Polished {
        sse,
        theta: t,
        iterations: MAX_ITERATIONS,
        gradient,
    }
}

/// Starting point from the tail mean and a log-linear regression.
fn heuristic_start(points: &[DecayPoint]) -> [f64; 3] {
    let mut sorted: Vec<&DecayPoint> = points.iter().collect();
    sorted.sort_by_key(|p| p.n);
    let tail = &sorted[sorted.len() - sorted.len().div_ceil(4)..];
    let b0 = (tail.iter().map(|p| p.mean).sum::<f64>() / tail.len() as f64).clamp(0.0, 1.0);
    let a0 = (sorted[0].mean - b0).clamp(0.0, 1.0);
    let (mut sx, mut sy, mut sxx, mut sxy, mut k) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in &sorted {
        let d = p.mean - b0;
        if d > 0.0 {
            let (x, y) = (p.n as f64, d.ln());
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            k += 1.0;
        }
    }
    let slope = if k >= 2.0 && (k * sxx - sx * sx).abs() > 0.0 {
        (k * sxy - sx * sy) / (k * sxx - sx * sx)
    } else {
        -0.01
    };
    [a0, slope.exp().clamp(0.0, 1.0), b0]
}

/// p grid for the profile search, dense near 1 where benchmarking decays live.
fn profile_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (0..=40).map(|k| k as f64 / 40.0).collect();
    g.extend((0..=120).map(|k| 1.0 - 10f64.powf(-0.05 * k as f64)));
    g
}

fn check_points(points: &[DecayPoint]) -> Result<(usize, usize), FitError> {
    for p in points {
        if !p.mean.is_finite() || p.count == 0 || p.n == 0 || p.n > i32::MAX as usize {
            return Err(FitError::InvalidPoint(format!("{p:?}")));
        }
    }
    let mut ns: Vec<usize> = points.iter().map(|p| p.n).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 {
        return Err(FitError::TooFewLengths { found: ns.len() });
    }
    Ok((ns[0], ns[ns.len() - 1]))
}

fn weighted_variance(c: &Curve) -> (f64, f64) {
    let sw: f64 = c.w.iter().sum();
    let mean: f64 = c.y.iter().zip(&c.w).map(|(y, w)| y * w).sum::<f64>() / sw;
    let var = c.y.iter().zip(&c.w).map(|(y, w)| w * (y - mean).powi(2)).sum::<f64>() / sw;
    (mean, var)
}

fn finish(best: Polished) -> Result<Polished, FitError> {
    if best.gradient >= GRADIENT_TOL && best.iterations >= MAX_ITERATIONS {
        let t = &best.theta;
        return Err(FitError::NoConvergence {
            iterations: best.iterations,
            gradient_norm: best.gradient,
            a: t[0],
            p: t[1],
            b: t[t.len() - 1],
        });
    }
    if best.gradient >= GRADIENT_TOL {
        log::debug!("fit stopped at rounding floor with projected gradient {:e}", best.gradient);
    }
    Ok(best)
}

fn best_of(problem: &Problem, starts: Vec<Vec<f64>>) -> Polished {
    starts
        .into_iter()
        .map(|s| polish(problem, s))
        .min_by(|l, r| l.sse.total_cmp(&r.sse))
        .expect("at least one start")
}

/// Weighted nonlinear least squares of A·pⁿ + B with all three parameters in
/// [0, 1].
pub fn fit_decay(points: &[DecayPoint]) -> Result<DecayFit, FitError> {
    let (n_min, n_max) = check_points(points)?;
    let problem = Problem::new(&[points]);
    let curve = &problem.curves[0];
    let (mean, var) = weighted_variance(curve);
    if var < FLAT_VARIANCE_TOL {
        let t = [0.0, 1.0, mean.clamp(0.0, 1.0)];
        let mut fit = DecayFit::from_params(t, problem.sse(&t), 0, n_min, n_max);
        fit.p_identifiable = false;
        return Ok(fit);
    }
    let mut grid: Vec<([f64; 3], f64)> = profile_grid().into_iter().map(|p| best_linear(curve, p)).collect();
    grid.sort_by(|l, r| l.1.total_cmp(&r.1));
    let mut starts = vec![heuristic_start(points).to_vec()];
    starts.extend(grid.iter().take(2).map(|(t, _)| t.to_vec()));
    let best = finish(best_of(&problem, starts))?;
    let t = &best.theta;
    Ok(DecayFit::from_params([t[0], t[1], t[2]], best.sse, best.iterations, n_min, n_max))
}

/// Fits several decay curves jointly with one common asymptote B and
/// separate (A, p) per curve.
///
/// B depends only on SPAM and the inverse-gate noise, which every sequence
/// kind shares, so pooling it pins down curves that decay too little to
/// identify B on their own. `residual_norm` of each returned fit covers its
/// own curve.
pub fn fit_decays_shared_asymptote(sets: &[&[DecayPoint]]) -> Result<Vec<DecayFit>, FitError> {
    if sets.is_empty() {
        return Err(FitError::TooFewLengths { found: 0 });
    }
    let ranges = sets.iter().map(|s| check_points(s)).collect::<Result<Vec<_>, _>>()?;
    let problem = Problem::new(sets);
    let k = sets.len();
    if problem.curves.iter().all(|c| weighted_variance(c).1 < FLAT_VARIANCE_TOL) {
        let sw: f64 = problem.curves.iter().flat_map(|c| c.w.iter()).sum();
        let mean: f64 = problem
            .curves
            .iter()
            .flat_map(|c| c.y.iter().zip(&c.w))
            .map(|(y, w)| y * w)
            .sum::<f64>()
            / sw;
        let b = mean.clamp(0.0, 1.0);
        return Ok(problem
            .curves
            .iter()
            .zip(&ranges)
            .map(|(c, &(lo, hi))| {
                let sse = Problem::curve_sse(c, 0.0, 1.0, b) / c.w.iter().sum::<f64>();
                let mut f = DecayFit::from_params([0.0, 1.0, b], sse, 0, lo, hi);
                f.p_identifiable = false;
                f
            })
            .collect());
    }

    let grid = profile_grid();
    let profile_at = |b: f64| -> (Vec<f64>, f64) {
        let mut t = Vec::with_capacity(2 * k + 1);
        let mut total = 0.0;
        for c in &problem.curves {
            let (a, p, s) = grid
                .iter()
                .map(|&p| {
                    let a = best_amplitude(c, p, b);
                    (a, p, Problem::curve_sse(c, a, p, b))
                })
                .min_by(|l, r| l.2.total_cmp(&r.2))
                .expect("nonempty grid");
            t.extend([a, p]);
            total += s;
        }
        t.push(b);
        (t, total)
    };
    let mut scored: Vec<(Vec<f64>, f64)> = (0..=100).map(|i| profile_at(i as f64 / 100.0)).collect();
    // Each curve's own asymptote is a natural candidate as well.
    for c in &problem.curves {
        let mut alone = grid.iter().map(|&p| best_linear(c, p)).collect::<Vec<_>>();
        alone.sort_by(|l, r| l.1.total_cmp(&r.1));
        scored.push(profile_at(alone[0].0[2]));
    }
    scored.sort_by(|l, r| l.1.total_cmp(&r.1));
    let starts = scored.into_iter().take(3).map(|(t, _)| t).collect();
    let best = finish(best_of(&problem, starts))?;
    let t = &best.theta;
    let b = t[2 * k];
    Ok(problem
        .curves
        .iter()
        .zip(&ranges)
        .enumerate()
        .map(|(i, (c, &(lo, hi)))| {
            let (a, p) = (t[2 * i], t[2 * i + 1]);
            let own_weight: f64 = c.w.iter().sum();
            let sse = Problem::curve_sse(c, a, p, b) / own_weight;
            DecayFit::from_params([a, p, b], sse, best.iterations, lo, hi)
        })
        .collect())
}

/// Per-sequence survival estimates at one length.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthSamples {
    pub n: usize,
    pub values: Vec<f64>,
}

pub fn decay_points(samples: &[LengthSamples]) -> Vec<DecayPoint> {
    samples
        .iter()
        .filter(|s| !s.values.is_empty())
        .map(|s| {
            let k = s.values.len() as f64;
            let mean = s.values.iter().sum::<f64>() / k;
            let stderr = if s.values.len() > 1 {
                let var = s.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
                (var / k).sqrt()
            } else {
                0.0
            };
            DecayPoint {
                n: s.n,
                mean,
                count: s.values.len(),
                stderr,
            }
        })
        .collect()
}

/// One bootstrap resample: sequences redrawn with replacement within each
/// length.
pub fn resample<R: Rng + ?Sized>(samples: &[LengthSamples], rng: &mut R) -> Vec<LengthSamples> {
    samples
        .iter()
        .map(|s| LengthSamples {
            n: s.n,
            values: (0..s.values.len()).map(|_| s.values[rng.random_range(0..s.values.len())]).collect(),
        })
        .collect()
}

/// Sample standard deviation (n − 1 denominator); 0 for fewer than 2 values.
pub fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    pub p_ref: f64,
    #[serde(rename = "p_T")]
    pub p_t: f64,
    pub f_t: f64,
    pub bound: f64,
    pub f_clifford: f64,
}

/// Interleaved estimate from per-gate decay bases.
pub fn estimate_t_fidelity(p_ref: f64, p_t: f64, d: usize) -> FidelityEstimate {
    let df = d as f64;
    let k = df * df - 1.0;
    if p_t > p_ref {
        log::warn!("interleaved decay {p_t} exceeds reference decay {p_ref}; T gate looks better than the reference");
    }
    let f_t = ((df * (k * p_t + 1.0) / (k * p_ref + 1.0) + 1.0) / (df + 1.0)).clamp(0.0, 1.0);
    let f_clifford = fidelity_from_contraction(p_ref, d);
    FidelityEstimate {
        p_ref,
        p_t,
        f_t,
        bound: interleaved_bound(f_clifford, f_t, d),
        f_clifford,
    }
}

/// Half-width, in average fidelity, of the composition error bound.
pub fn interleaved_bound(f_clifford: f64, f_t: f64, d: usize) -> f64 {
    let c = chi00_from_fidelity(f_clifford, d).clamp(0.0, 1.0);
    let t = chi00_from_fidelity(f_t, d).clamp(0.0, 1.0);
    chi_bound(c, t) * d as f64 / (d as f64 + 1.0)
}

/// The bound in χ₀₀ units.
pub fn chi_bound(chi_c: f64, chi_t: f64) -> f64 {
    2.0 * ((1.0 - chi_c) * chi_c * (1.0 - chi_t) * chi_t).max(0.0).sqrt() + (1.0 - chi_c) * (1.0 - chi_t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TukeySummary {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

/// Type-7 (linear interpolation) quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, 0.5)
}

/// Box-plot statistics. Panics on empty input.
pub fn tukey_summary(values: &[f64]) -> TukeySummary {
    assert!(!values.is_empty(), "tukey_summary needs data");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&v, 0.25);
    let q3 = quantile_sorted(&v, 0.75);
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside = v.iter().copied().filter(|&x| x >= lo_fence && x <= hi_fence);
    let whisker_low = inside.clone().fold(f64::INFINITY, f64::min);
    let whisker_high = inside.fold(f64::NEG_INFINITY, f64::max);
    TukeySummary {
        median: quantile_sorted(&v, 0.5),
        q1,
        q3,
        whisker_low,
        whisker_high,
        outliers: v.iter().copied().filter(|&x| x < lo_fence || x > hi_fence).collect(),
    }
}
