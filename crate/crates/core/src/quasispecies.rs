//! Deterministic infinite-population mutation–selection dynamics, and
//! numerical location of the error threshold.
//!
//! On a class-symmetric landscape the 2^n genotypes collapse exactly into
//! n + 1 error classes (Hamming distance from the master genotype), so the
//! mutation–selection operator is a dense (n+1)×(n+1) matrix and its
//! stationary distribution is computable at any desk-scale n.  The error
//! threshold — the mutation rate above which selection can no longer hold
//! the master class — is located from measured data alone: the growth rate
//! λ₁(p) of the stationary state follows `σ(1−p)^n` while selection
//! dominates and flattens out once mutation wins, so the detector fits both
//! asymptotic branches of `ln λ₁` against `ln(1−p)` and returns their
//! intersection.  The closed forms `1 − σ^(−1/n)` ([`exact_threshold`]) and
//! `ln σ / n` ([`asymptotic_threshold`]) are kept as independent references.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};

/// Default L1 tolerance for the stationary power iteration.
pub const DEFAULT_POWER_TOL: f64 = 1e-10;
/// Default iteration budget for the stationary power iteration.
pub const DEFAULT_POWER_MAX_ITERS: usize = 1_000_000;

/// Per-bit mutation kernel between error classes.
///
/// Entry `(l, k)` is the probability that one genotype at Hamming distance
/// `k` from the master moves to distance `l` after per-bit mutation; every
/// column sums to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassMatrix {
    n: usize,
    data: Vec<f64>, // row-major, (n+1) × (n+1)
}

impl ClassMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.n + 1
    }

    pub fn entry(&self, l: usize, k: usize) -> f64 {
        self.data[l * (self.n + 1) + k]
    }

    /// `y = M x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.size());
        let s = self.size();
        let mut y = vec![0.0; s];
        for (l, yl) in y.iter_mut().enumerate() {
            let row = &self.data[l * s..(l + 1) * s];
            *yl = row.iter().zip(x).map(|(m, v)| m * v).sum();
        }
        y
    }
}

// exact integer binomials stay exact in f64 up to n = 25
const EXACT_BINOMIAL_MAX_N: usize = 25;

fn binomial_exact(n: usize, k: usize) -> u64 {
    debug_assert!(k <= n && n <= EXACT_BINOMIAL_MAX_N);
    let k = k.min(n - k);
    let mut num = 1u64;
    for i in 0..k {
        num = num * (n - i) as u64 / (i + 1) as u64;
    }
    num
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut lf = vec![0.0; n + 1];
    for i in 1..=n {
        lf[i] = lf[i - 1] + Float::ln(i as f64);
    }
    lf
}

/// Builds the class mutation matrix for per-bit flip probability `p`.
///
/// A genotype in class `k` reaches class `l` by flipping `j` of its `k`
/// wrong bits back and `l − k + j` of its `n − k` correct bits, so the entry
/// sums `C(k,j) · C(n−k, l−k+j) · p^(l−k+2j) · (1−p)^(n−l+k−2j)` over
/// feasible `j`.  Binomials are exact integers up to n = 25 and evaluated in
/// log space above.
pub fn class_mutation_matrix(n: usize, p: f64) -> Result<ClassMatrix> {
    if n == 0 {
        return Err(Error::Config("class model needs n ≥ 1".to_string()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!(
            "mutation probability must be in [0, 1], got {p}"
        )));
    }
    let s = n + 1;
    let mut data = vec![0.0; s * s];

    // deterministic limits keep the log-space path free of ln(0)
    if p == 0.0 {
        for k in 0..s {
            data[k * s + k] = 1.0;
        }
        return Ok(ClassMatrix { n, data });
    }
    if p == 1.0 {
        for k in 0..s {
            data[(n - k) * s + k] = 1.0;
        }
        return Ok(ClassMatrix { n, data });
    }

    let (ln_p, ln_q) = (Float::ln(p), Float::ln(1.0 - p));
    let lf = ln_factorials(n);
    let ln_choose = |n_: usize, k_: usize| lf[n_] - lf[k_] - lf[n_ - k_];

    for k in 0..s {
        for l in 0..s {
            let mut sum = 0.0;
            for j in 0..=k {
                let back = j; // wrong bits repaired
                let fwd = (l + back).wrapping_sub(k); // correct bits spoiled
                if l + back < k || fwd > n - k {
                    continue;
                }
                let flips = back + fwd;
                let term = if n <= EXACT_BINOMIAL_MAX_N {
                    binomial_exact(k, back) as f64
                        * binomial_exact(n - k, fwd) as f64
                        * Float::powi(p, flips as i32)
                        * Float::powi(1.0 - p, (n - flips) as i32)
                } else {
                    Float::exp(
                        ln_choose(k, back)
                            + ln_choose(n - k, fwd)
                            + flips as f64 * ln_p
                            + (n - flips) as f64 * ln_q,
                    )
                };
                sum += term;
            }
            data[l * s + k] = sum;
        }
    }
    Ok(ClassMatrix { n, data })
}

/// Fitness-by-error-class model with a mutation probability.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassModel {
    n: usize,
    class_fitness: Vec<f64>,
    mutation_prob: f64,
}

impl ClassModel {
    /// `class_fitness[k]` is the fitness of any genotype at distance `k`
    /// from the master; all entries must be strictly positive.
    pub fn new(class_fitness: Vec<f64>, mutation_prob: f64) -> Result<Self> {
        if class_fitness.len() < 2 {
            return Err(Error::Config(
                "class fitness vector needs at least two entries".to_string(),
            ));
        }
        if class_fitness.iter().any(|f| !(*f > 0.0) || !f.is_finite()) {
            return Err(Error::Config(
                "class fitness values must be finite and > 0".to_string(),
            ));
        }
        if !(0.0..=1.0).contains(&mutation_prob) {
            return Err(Error::Domain(format!(
                "mutation probability must be in [0, 1], got {mutation_prob}"
            )));
        }
        Ok(ClassModel {
            n: class_fitness.len() - 1,
            class_fitness,
            mutation_prob,
        })
    }

    /// Sharp peak: fitness σ in the master class, 1 in every other class.
    pub fn sharp_peak(n: usize, sigma: f64, mutation_prob: f64) -> Result<Self> {
        if !(sigma > 1.0) || !sigma.is_finite() {
            return Err(Error::Config(format!(
                "sharp-peak height must be finite and > 1, got {sigma}"
            )));
        }
        let mut class_fitness = vec![1.0; n + 1];
        class_fitness[0] = sigma;
        Self::new(class_fitness, mutation_prob)
    }

    /// Selectively neutral model (all classes at fitness 1).
    pub fn flat(n: usize, mutation_prob: f64) -> Result<Self> {
        Self::new(vec![1.0; n + 1], mutation_prob)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn class_fitness(&self) -> &[f64] {
        &self.class_fitness
    }

    pub fn mutation_prob(&self) -> f64 {
        self.mutation_prob
    }
}

/// Stationary frequencies of the error classes; entries sum to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassDistribution {
    freq: Vec<f64>,
}

impl ClassDistribution {
    pub fn freq(&self) -> &[f64] {
        &self.freq
    }

    /// Stationary frequency of the master class.
    pub fn master_frequency(&self) -> f64 {
        self.freq[0]
    }
}

fn l1_normalize(x: &mut [f64]) {
    let sum: f64 = x.iter().sum();
    for v in x.iter_mut() {
        *v /= sum;
    }
}

/// Fixed point of `x ↦ normalize(M · (F · x))` from the uniform start:
/// the principal eigenvector of the mutation–selection operator.
///
/// Stops when successive iterates differ by less than `tol` in L1 norm;
/// fails with the last residual if `max_iters` is exhausted.
pub fn stationary_distribution(
    model: &ClassModel,
    tol: f64,
    max_iters: usize,
) -> Result<ClassDistribution> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::Config(format!(
            "tolerance must be finite and > 0, got {tol}"
        )));
    }
    let matrix = class_mutation_matrix(model.n, model.mutation_prob)?;
    let s = model.n + 1;
    let mut x = vec![1.0 / s as f64; s];
    let mut scratch = vec![0.0; s];
    for iteration in 1..=max_iters {
        for (i, v) in scratch.iter_mut().enumerate() {
            *v = model.class_fitness[i] * x[i];
        }
        let mut y = matrix.apply(&scratch);
        l1_normalize(&mut y);
        let residual: f64 = y
            .iter()
            .zip(&x)
            .map(|(a, b)| Float::abs(a - b))
            .sum();
        x = y;
        if residual < tol {
            return Ok(ClassDistribution { freq: x });
        }
        if iteration == max_iters {
            return Err(Error::Convergence {
                residual,
                iterations: iteration,
            });
        }
    }
    unreachable!("loop returns or errors on the last iteration")
}

/// Mean fitness of a class distribution — the growth rate λ₁ of the
/// stationary state.
pub fn mean_fitness(model: &ClassModel, dist: &ClassDistribution) -> f64 {
    model
        .class_fitness
        .iter()
        .zip(dist.freq())
        .map(|(f, x)| f * x)
        .sum()
}

/// Master-class stationary frequency relative to its selectively neutral
/// value at the same mutation probability.  Large while selection holds the
/// master class, ≈ 1 once mutation dominates.
pub fn ratio_to_neutral(
    n: usize,
    sigma: f64,
    mutation_prob: f64,
    tol: f64,
    max_iters: usize,
) -> Result<f64> {
    let peaked = stationary_distribution(&ClassModel::sharp_peak(n, sigma, mutation_prob)?, tol, max_iters)?;
    let neutral = stationary_distribution(&ClassModel::flat(n, mutation_prob)?, tol, max_iters)?;
    Ok(peaked.master_frequency() / neutral.master_frequency())
}

/// Exact finite-n balance point: the solution of `σ(1−p)^n = 1`.
///
/// `sigma` must exceed 1.
pub fn exact_threshold(n: usize, sigma: f64) -> f64 {
    assert!(sigma > 1.0, "sigma must exceed 1");
    assert!(n >= 1);
    1.0 - Float::powf(sigma, -1.0 / n as f64)
}

/// First-order (large-n) critical mutation rate per bit, `ln σ / n`.
pub fn asymptotic_threshold(n: usize, sigma: f64) -> f64 {
    assert!(sigma > 1.0, "sigma must exceed 1");
    assert!(n >= 1);
    Float::ln(sigma) / n as f64
}

/// Tuning knobs for [`detect_error_threshold_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdOptions {
    /// Lower edge of the first scan window.
    pub p_min: f64,
    /// Upper edge of every scan window.
    pub p_max: f64,
    /// Grid points per pass (log-spaced).
    pub points: usize,
    /// Maximum window refinements before giving up.
    pub max_passes: usize,
    /// Power-iteration tolerance for each stationary solve.
    pub power_tol: f64,
    /// Power-iteration budget for each stationary solve.
    pub power_max_iters: usize,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        ThresholdOptions {
            p_min: 1e-3,
            p_max: 0.5,
            points: 33,
            max_passes: 16,
            power_tol: DEFAULT_POWER_TOL,
            power_max_iters: DEFAULT_POWER_MAX_ITERS,
        }
    }
}

struct BranchFit {
    p_hat: f64,
}

fn fit_pass(n: usize, sigma: f64, p_lo: f64, p_hi: f64, opts: &ThresholdOptions) -> Result<BranchFit> {
    let points = opts.points;
    let ratio = Float::powf(p_hi / p_lo, 1.0 / (points - 1) as f64);
    let mut log_lams = Vec::with_capacity(points);
    let mut ps = Vec::with_capacity(points);
    let mut p = p_lo;
    for _ in 0..points {
        let model = ClassModel::sharp_peak(n, sigma, p.min(1.0))?;
        let dist = stationary_distribution(&model, opts.power_tol, opts.power_max_iters)?;
        ps.push(p);
        log_lams.push(Float::ln(mean_fitness(&model, &dist)));
        p *= ratio;
    }
    let top = log_lams.iter().cloned().fold(f64::MIN, f64::max);
    let bot = log_lams.iter().cloned().fold(f64::MAX, f64::min);
    if top - bot < 0.1 {
        return Err(Error::ThresholdNotFound(format!(
            "no transition structure in ({p_lo:.3e}, {p_hi:.3e}): growth rate spans only {:.3}",
            top - bot
        )));
    }
    let upper_cut = bot + 0.5 * (top - bot);
    let lower_cut = bot + 0.25 * (top - bot);

    // selection branch: ln λ = a + m · ln(1−p), least squares
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut count = 0usize;
    for (p, ll) in ps.iter().zip(&log_lams) {
        if *ll >= upper_cut {
            let x = Float::ln(1.0 - p);
            sx += x;
            sy += ll;
            sxx += x * x;
            sxy += x * ll;
            count += 1;
        }
    }
    let bulk: Vec<f64> = log_lams.iter().cloned().filter(|ll| *ll <= lower_cut).collect();
    if count < 4 || bulk.len() < 2 {
        return Err(Error::ThresholdNotFound(format!(
            "insufficient branch coverage: {count} selection points, {} bulk points",
            bulk.len()
        )));
    }
    let denom = sxx - sx * sx / count as f64;
    let slope = (sxy - sx * sy / count as f64) / denom;
    let intercept = (sy - slope * sx) / count as f64;
    if !(slope > 0.0) || !slope.is_finite() {
        return Err(Error::ThresholdNotFound(format!(
            "selection branch fit degenerate (slope {slope})"
        )));
    }
    let ln_bulk = bulk.iter().sum::<f64>() / bulk.len() as f64;
    let p_hat = 1.0 - Float::exp((ln_bulk - intercept) / slope);
    Ok(BranchFit { p_hat })
}

/// Locates the error threshold of the sharp-peak model with default
/// [`ThresholdOptions`]; `tol` is the absolute tolerance on the returned
/// mutation probability.
pub fn detect_error_threshold(n: usize, sigma: f64, tol: f64) -> Result<f64> {
    detect_error_threshold_with(n, sigma, tol, &ThresholdOptions::default())
}

/// Asymptote-intersection detector.
///
/// Each pass measures the stationary growth rate λ₁ on a log-spaced grid,
/// fits the selection branch `ln λ₁ ≈ a + m·ln(1−p)` over the upper half of
/// the measured range and the flat mutation-dominated level over the lower
/// quarter, and intersects the two; the window is then refocused around the
/// intersection until it moves by less than `tol` between passes.
pub fn detect_error_threshold_with(
    n: usize,
    sigma: f64,
    tol: f64,
    options: &ThresholdOptions,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::Config("n must be ≥ 1".to_string()));
    }
    if !(sigma > 1.0) || !sigma.is_finite() {
        return Err(Error::Config(format!(
            "sigma must be finite and > 1, got {sigma}"
        )));
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::Config(format!(
            "tolerance must be finite and > 0, got {tol}"
        )));
    }
    if options.points < 8 || !(options.p_min > 0.0) || !(options.p_max > options.p_min) {
        return Err(Error::Config("invalid threshold scan options".to_string()));
    }

    let mut p_lo = options.p_min;
    let mut p_hi = options.p_max;
    let mut previous: Option<f64> = None;
    for _ in 0..options.max_passes {
        let fit = fit_pass(n, sigma, p_lo, p_hi, options)?;
        let p_hat = fit.p_hat;
        if !(p_hat > 0.0 && p_hat < options.p_max) || !p_hat.is_finite() {
            return Err(Error::ThresholdNotFound(format!(
                "branch intersection {p_hat} outside the scan range"
            )));
        }
        if let Some(prev) = previous {
            if Float::abs(p_hat - prev) < tol {
                return Ok(p_hat);
            }
        }
        previous = Some(p_hat);
        p_lo = (p_hat / 6.0).max(1e-9);
        p_hi = (6.0 * p_hat).min(options.p_max);
    }
    Err(Error::ThresholdNotFound(
        "intersection did not stabilize within the pass budget".to_string(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn column_sums(m: &ClassMatrix) -> Vec<f64> {
        (0..m.size())
            .map(|k| (0..m.size()).map(|l| m.entry(l, k)).sum())
            .collect()
    }

    #[test]
    fn zero_rate_gives_identity() {
        let m = class_mutation_matrix(5, 0.0).unwrap();
        for k in 0..=5 {
            for l in 0..=5 {
                assert_eq!(m.entry(l, k), if l == k { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn unit_rate_complements_classes() {
        let m = class_mutation_matrix(5, 1.0).unwrap();
        for k in 0..=5 {
            for l in 0..=5 {
                assert_eq!(m.entry(l, k), if l == 5 - k { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn single_bit_matrix() {
        let p = 0.3;
        let m = class_mutation_matrix(1, p).unwrap();
        assert!((m.entry(0, 0) - (1.0 - p)).abs() < 1e-15);
        assert!((m.entry(1, 0) - p).abs() < 1e-15);
        assert!((m.entry(0, 1) - p).abs() < 1e-15);
        assert!((m.entry(1, 1) - (1.0 - p)).abs() < 1e-15);
    }

    #[test]
    fn columns_are_stochastic_in_both_binomial_regimes() {
        for (n, p) in [(3, 0.1), (10, 0.25), (25, 0.01), (30, 0.05), (64, 0.4)] {
            let m = class_mutation_matrix(n, p).unwrap();
            for (k, sum) in column_sums(&m).iter().enumerate() {
                assert!(
                    (sum - 1.0).abs() < 1e-12,
                    "n={n} p={p} column {k} sums to {sum}"
                );
            }
        }
    }

    #[test]
    fn complement_symmetry() {
        // complementing every bit relabels classes k ↔ n−k at fixed p, and
        // flipping with rate 1−p equals flipping with rate p then
        // complementing, which relabels the output class only
        for n in [4usize, 17, 30] {
            let p = 0.23;
            let a = class_mutation_matrix(n, p).unwrap();
            let b = class_mutation_matrix(n, 1.0 - p).unwrap();
            for k in 0..=n {
                for l in 0..=n {
                    assert!(
                        (a.entry(l, k) - a.entry(n - l, n - k)).abs() < 1e-12,
                        "relabel: n={n} l={l} k={k}"
                    );
                    assert!(
                        (b.entry(l, k) - a.entry(n - l, k)).abs() < 1e-12,
                        "rate flip: n={n} l={l} k={k}"
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn columns_sum_to_one(n in 1usize..40, p in 0.0f64..=1.0) {
            let m = class_mutation_matrix(n, p).unwrap();
            for sum in column_sums(&m) {
                prop_assert!((sum - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_out_of_range_rate() {
        assert!(matches!(
            class_mutation_matrix(4, -0.1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(class_mutation_matrix(4, 1.1), Err(Error::Domain(_))));
    }

    #[test]
    fn pure_selection_fixes_the_master_class() {
        let model = ClassModel::sharp_peak(8, 4.0, 0.0).unwrap();
        let dist = stationary_distribution(&model, 1e-12, 10_000).unwrap();
        assert!(dist.master_frequency() > 1.0 - 1e-9);
    }

    #[test]
    fn neutral_stationary_state_is_binomial() {
        let n = 12;
        for p in [0.05, 0.3, 0.5] {
            let model = ClassModel::flat(n, p).unwrap();
            let dist = stationary_distribution(&model, 1e-12, 1_000_000).unwrap();
            let mut l1 = 0.0;
            for (k, freq) in dist.freq().iter().enumerate() {
                let expected = binomial_exact(n, k) as f64 / (1u64 << n) as f64;
                l1 += (freq - expected).abs();
            }
            assert!(l1 < 1e-8, "p={p}: L1 distance {l1}");
        }
    }

    #[test]
    fn stationary_state_is_a_normalized_fixed_point() {
        let tol = 1e-10;
        let model = ClassModel::sharp_peak(20, 2.0, 0.02).unwrap();
        let dist = stationary_distribution(&model, tol, 1_000_000).unwrap();
        let sum: f64 = dist.freq().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!(dist.freq().iter().all(|f| *f >= 0.0));

        let matrix = class_mutation_matrix(20, 0.02).unwrap();
        let mut y: Vec<f64> = dist
            .freq()
            .iter()
            .zip(model.class_fitness())
            .map(|(x, f)| x * f)
            .collect();
        y = matrix.apply(&y);
        l1_normalize(&mut y);
        let residual: f64 = y
            .iter()
            .zip(dist.freq())
            .map(|(a, b)| (a - b).abs())
            .sum();
        assert!(residual < 2.0 * tol);
    }

    #[test]
    fn master_class_collapses_above_threshold() {
        // below threshold the master class is far above neutral, above it
        // the whole profile is within 1e-3 of the neutral one
        let n = 20;
        let below = stationary_distribution(
            &ClassModel::sharp_peak(n, 2.0, 0.01).unwrap(),
            1e-10,
            1_000_000,
        )
        .unwrap();
        let neutral_at = |p: f64| {
            stationary_distribution(&ClassModel::flat(n, p).unwrap(), 1e-10, 1_000_000).unwrap()
        };
        assert!(below.master_frequency() > 100.0 * neutral_at(0.01).master_frequency());

        let above = stationary_distribution(
            &ClassModel::sharp_peak(n, 2.0, 0.06).unwrap(),
            1e-10,
            1_000_000,
        )
        .unwrap();
        let l1: f64 = above
            .freq()
            .iter()
            .zip(neutral_at(0.06).freq())
            .map(|(a, b)| (a - b).abs())
            .sum();
        assert!(l1 < 1e-3, "L1 distance above threshold: {l1}");
    }

    #[test]
    fn convergence_budget_is_reported() {
        let model = ClassModel::sharp_peak(20, 2.0, 0.03).unwrap();
        assert!(matches!(
            stationary_distribution(&model, 1e-12, 3),
            Err(Error::Convergence { iterations: 3, .. })
        ));
    }

    #[test]
    fn exact_threshold_values() {
        assert_eq!(exact_threshold(1, 2.0), 0.5);
        let t = exact_threshold(10, 4.0);
        assert!((t - 0.12945).abs() < 1e-5);
        // the first-order form overshoots the finite-n value by ≈ 7% here
        let gap = (asymptotic_threshold(10, 4.0) - t) / t;
        assert!(gap > 0.05 && gap < 0.09, "relative gap {gap}");
        // and converges to it for large n
        let n = 1000;
        let scaled = n as f64 * exact_threshold(n, 4.0);
        assert!((scaled - 4.0f64.ln()).abs() < 1e-2);
    }

    #[test]
    fn detector_matches_the_exact_threshold() {
        let detected = detect_error_threshold(10, 4.0, 1e-4).unwrap();
        let exact = exact_threshold(10, 4.0);
        assert!(
            ((detected - exact) / exact).abs() < 0.05,
            "detected {detected}, exact {exact}"
        );
    }

    #[test]
    fn detected_threshold_is_monotone_in_sigma() {
        let lo = detect_error_threshold(10, 2.0, 1e-4).unwrap();
        let hi = detect_error_threshold(10, 4.0, 1e-4).unwrap();
        assert!(hi > lo);
    }

    #[test]
    fn near_neutral_peak_is_reported_as_undetectable_or_tiny() {
        match detect_error_threshold(10, 1.000001, 1e-4) {
            Err(Error::ThresholdNotFound(_)) => {}
            Ok(p) => assert!(p < 5e-3, "near-neutral threshold {p}"),
            Err(other) => panic!("unexpected error {other}"),
        }
    }
}
