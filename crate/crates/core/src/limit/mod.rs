//! Long-run experiments for sequences of independent coordinates with
//! finitely many rational values: law-of-large-numbers and iterated-
//! logarithm trajectories, central-limit sampling, and the exact side
//! conditions that license each normalization.
//!
//! The coordinate marginals determine one measure on the sequence space
//! under which the coordinate algebras are independent, so simulating
//! coordinate `i` from its own table is sampling from exactly that
//! measure. Draws are a pure function of `(seed, replication,
//! coordinate)`, making every run reproducible and thread-invariant.
//! Means and variances are computed in exact rational arithmetic and
//! rounded once on the way into floating point.

pub mod normal;
mod rng;

pub use normal::{ks_distance_to_standard_normal, standard_normal_cdf};

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use rng::{keyed_u64, TableSampler};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LimitError {
    #[error("support needs at least one point")]
    EmptySupport,
    #[error("support points must be strictly increasing")]
    UnsortedSupport,
    #[error("expected {expected} probabilities, got {got}")]
    ProbabilityCount { expected: usize, got: usize },
    #[error("probability {index} is negative")]
    NegativeProbability { index: usize },
    #[error("probabilities sum to {total}, not 1")]
    NotAProbability { total: BigRational },
    #[error("the coordinate distribution is degenerate (zero variance)")]
    ZeroVariance,
    #[error("the horizon must be at least 1")]
    ZeroHorizon,
    #[error("n = {n} exceeds the declared horizon {horizon}")]
    HorizonExceeded { n: u64, horizon: u64 },
    #[error("need n >= {min}, got {n}")]
    TooShort { n: u64, min: u64 },
    #[error("nothing to simulate")]
    EmptyExperiment,
    #[error("the accumulated variance never reaches the normalization threshold")]
    NormalizationUndefined,
    #[error("the variance condition could not be certified on the checked prefix")]
    VarianceConditionUndecided,
    #[error("a varying sequence needs an explicit condition gate")]
    ConditionRequired,
    #[error("Lindeberg sum {value} exceeds the allowed threshold {threshold}")]
    LindebergExceeded { value: BigRational, threshold: BigRational },
    #[error("epsilon must be positive")]
    InvalidEpsilon,
}

/// The common value set of every coordinate: finitely many exact
/// rational points, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeSpec {
    support: Vec<BigRational>,
}

impl RangeSpec {
    pub fn new(support: Vec<BigRational>) -> Result<Self, LimitError> {
        if support.is_empty() {
            return Err(LimitError::EmptySupport);
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LimitError::UnsortedSupport);
        }
        Ok(RangeSpec { support })
    }

    pub fn support(&self) -> &[BigRational] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A probability table over a range's support points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateMeasure {
    probs: Vec<BigRational>,
}

impl CoordinateMeasure {
    pub fn new(probs: Vec<BigRational>) -> Result<Self, LimitError> {
        if let Some(index) = probs.iter().position(|p| p < &BigRational::zero()) {
            return Err(LimitError::NegativeProbability { index });
        }
        let total: BigRational = probs.iter().sum();
        if !total.is_integer() || total != BigRational::from_integer(1.into()) {
            return Err(LimitError::NotAProbability { total });
        }
        Ok(CoordinateMeasure { probs })
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.probs
    }

    /// Exact mean and variance over the given support.
    pub fn moments(&self, range: &RangeSpec) -> Result<Moments, LimitError> {
        if self.probs.len() != range.len() {
            return Err(LimitError::ProbabilityCount {
                expected: range.len(),
                got: self.probs.len(),
            });
        }
        let mean: BigRational = range
            .support()
            .iter()
            .zip(&self.probs)
            .map(|(x, p)| x * p)
            .sum();
        let variance: BigRational = range
            .support()
            .iter()
            .zip(&self.probs)
            .map(|(x, p)| {
                let d = x - &mean;
                &d * &d * p
            })
            .sum();
        Ok(Moments { mean, variance })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Moments {
    pub mean: BigRational,
    pub variance: BigRational,
}

/// Which experiment a report came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Lln,
    Clt,
    Lil,
}

/// How the coordinate distribution varies along the sequence.
#[derive(Clone)]
pub enum MeasureRule {
    /// Every coordinate shares one table.
    Identical(CoordinateMeasure),
    /// Coordinate `k` (1-based) draws from `rule(k)`.
    Varying {
        rule: Arc<dyn Fn(u64) -> CoordinateMeasure + Send + Sync>,
        /// Declared tail behaviour of the coordinate variances, needed
        /// to certify side conditions.
        variance_bound: Option<TailBound>,
    },
}

impl std::fmt::Debug for MeasureRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MeasureRule::Identical(m) => f.debug_tuple("Identical").field(m).finish(),
            MeasureRule::Varying { variance_bound, .. } => f
                .debug_struct("Varying")
                .field("variance_bound", variance_bound)
                .finish_non_exhaustive(),
        }
    }
}

/// A fully specified coordinate sequence: value set, distribution rule,
/// and the largest index the experiment may touch.
#[derive(Debug, Clone)]
pub struct SequenceSpec {
    range: RangeSpec,
    rule: MeasureRule,
    horizon: u64,
}

impl SequenceSpec {
    /// A sequence whose coordinates all share `measure`.
    pub fn identical(
        range: RangeSpec,
        measure: CoordinateMeasure,
        horizon: u64,
    ) -> Result<Self, LimitError> {
        if horizon == 0 {
            return Err(LimitError::ZeroHorizon);
        }
        // Validates the table length against the support.
        measure.moments(&range)?;
        Ok(SequenceSpec { range, rule: MeasureRule::Identical(measure), horizon })
    }

    /// Like [`identical`](Self::identical), but additionally rejects
    /// tables that cannot feed the intended experiment: central-limit
    /// and iterated-logarithm normalizations need a nonconstant
    /// coordinate.
    pub fn identical_for(
        range: RangeSpec,
        measure: CoordinateMeasure,
        horizon: u64,
        mode: Mode,
    ) -> Result<Self, LimitError> {
        let moments = measure.moments(&range)?;
        if matches!(mode, Mode::Clt | Mode::Lil) && moments.variance.is_zero() {
            return Err(LimitError::ZeroVariance);
        }
        Self::identical(range, measure, horizon)
    }

    /// A sequence with a per-coordinate table rule.
    pub fn varying(
        range: RangeSpec,
        rule: Arc<dyn Fn(u64) -> CoordinateMeasure + Send + Sync>,
        variance_bound: Option<TailBound>,
        horizon: u64,
    ) -> Result<Self, LimitError> {
        if horizon == 0 {
            return Err(LimitError::ZeroHorizon);
        }
        Ok(SequenceSpec { range, rule: MeasureRule::Varying { rule, variance_bound }, horizon })
    }

    pub fn range(&self) -> &RangeSpec {
        &self.range
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn is_identical(&self) -> bool {
        matches!(self.rule, MeasureRule::Identical(_))
    }

    /// The table of coordinate `k` (1-based).
    pub fn measure_at(&self, k: u64) -> CoordinateMeasure {
        match &self.rule {
            MeasureRule::Identical(m) => m.clone(),
            MeasureRule::Varying { rule, .. } => rule(k),
        }
    }

    /// Exact moments of coordinate `k`, validating the table length.
    pub fn moments_at(&self, k: u64) -> Result<Moments, LimitError> {
        self.measure_at(k).moments(&self.range)
    }

    fn check_n(&self, n: u64) -> Result<(), LimitError> {
        if n > self.horizon {
            return Err(LimitError::HorizonExceeded { n, horizon: self.horizon });
        }
        Ok(())
    }
}

/// Declared tail behaviour of a nonnegative sequence, indexed from 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TailBound {
    /// Values stay at or below `constant` from index `from` on.
    BoundedAbove { constant: BigRational, from: u64 },
    /// Values stay at or above `slope * n` from index `from` on.
    GrowsLinearly { slope: BigRational, from: u64 },
}

/// A variance sequence together with its declared tail behaviour.
pub struct VarianceSequence {
    values: Arc<dyn Fn(u64) -> BigRational + Send + Sync>,
    bound: Option<TailBound>,
}

impl VarianceSequence {
    pub fn new(
        values: impl Fn(u64) -> BigRational + Send + Sync + 'static,
        bound: Option<TailBound>,
    ) -> Self {
        VarianceSequence { values: Arc::new(values), bound }
    }

    /// The constant sequence, bounded above by itself.
    pub fn constant(value: BigRational) -> Self {
        let bound = TailBound::BoundedAbove { constant: value.clone(), from: 1 };
        VarianceSequence { values: Arc::new(move |_| value.clone()), bound: Some(bound) }
    }

    /// The sequence `slope * n`, growing linearly by construction.
    pub fn linear(slope: BigRational) -> Self {
        let bound = TailBound::GrowsLinearly { slope: slope.clone(), from: 1 };
        VarianceSequence {
            values: Arc::new(move |n| &slope * BigRational::from_integer(n.into())),
            bound: Some(bound),
        }
    }

    /// Coordinate variances of a sequence spec, carrying its declared
    /// bound. Identical sequences are constant, hence self-certifying.
    pub fn from_spec(spec: &SequenceSpec) -> Result<Self, LimitError> {
        match &spec.rule {
            MeasureRule::Identical(_) => Ok(Self::constant(spec.moments_at(1)?.variance)),
            MeasureRule::Varying { rule, variance_bound } => {
                let range = spec.range.clone();
                let rule = Arc::clone(rule);
                Ok(VarianceSequence {
                    values: Arc::new(move |n| {
                        rule(n)
                            .moments(&range)
                            .map(|m| m.variance)
                            .unwrap_or_else(|_| BigRational::zero())
                    }),
                    bound: variance_bound.clone(),
                })
            }
        }
    }

    pub fn value(&self, n: u64) -> BigRational {
        (self.values)(n)
    }

    pub fn bound(&self) -> Option<&TailBound> {
        self.bound.as_ref()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convergence {
    Convergent,
    Divergent,
    Undecided,
}

/// Outcome of testing whether `Σ variance(n) / n²` converges.
#[derive(Debug, Clone, PartialEq)]
pub struct KolmogorovReport {
    pub verdict: Convergence,
    /// How many leading terms the declaration was checked against.
    pub prefix_checked: u64,
    /// `Σ_{n<=prefix} variance(n)/n²`, for orientation only.
    pub partial_sum: f64,
    /// First index where the declared bound failed, if any.
    pub violation: Option<u64>,
}

/// Certifies convergence or divergence of `Σ variance(n)/n²` from the
/// sequence's declared tail bound.
///
/// A bounded-above tail gives convergence by comparison with `Σ c/n²`; a
/// linearly growing tail gives divergence by comparison with the
/// harmonic series. The declaration is checked exactly, term by term, on
/// the first `prefix` values; no bound, or a bound violated on the
/// prefix, leaves the condition undecided. The partial sum is reported
/// as a floating-point convenience and certifies nothing.
pub fn kolmogorov_condition(seq: &VarianceSequence, prefix: u64) -> KolmogorovReport {
    let prefix = prefix.max(1);
    let mut violation = None;
    let mut partial = 0.0f64;
    for n in 1..=prefix {
        let v = seq.value(n);
        let ok = match seq.bound() {
            Some(TailBound::BoundedAbove { constant, from }) => {
                n < *from || &v <= constant
            }
            Some(TailBound::GrowsLinearly { slope, from }) => {
                n < *from || v >= slope * BigRational::from_integer(n.into())
            }
            None => true,
        };
        if !ok && violation.is_none() {
            violation = Some(n);
        }
        partial += (v / BigRational::from_integer((n * n).into()))
            .to_f64()
            .unwrap_or(f64::NAN);
    }
    let verdict = match (seq.bound(), violation) {
        (Some(TailBound::BoundedAbove { .. }), None) => Convergence::Convergent,
        (Some(TailBound::GrowsLinearly { slope, .. }), None) => {
            if slope > &BigRational::zero() {
                Convergence::Divergent
            } else {
                Convergence::Undecided
            }
        }
        _ => Convergence::Undecided,
    };
    KolmogorovReport { verdict, prefix_checked: prefix, partial_sum: partial, violation }
}

/// Threshold test for the Lindeberg sum at the simulated length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LindebergGate {
    pub epsilon: BigRational,
    /// Largest acceptable value of the sum.
    pub threshold: BigRational,
}

/// Result of one simulation run. Exact quantities are rational; sampled
/// quantities are floating point and deterministic for a given seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub mode: Mode,
    pub n: u64,
    pub replications: u64,
    pub seed: u64,
    /// Exact mean of the first coordinate.
    pub coord_mean: BigRational,
    /// Exact variance of the first coordinate.
    pub coord_variance: BigRational,
    /// Exact `Σ_{i<=n}` of the coordinate variances.
    pub variance_sum: BigRational,
    /// `(k, statistic at k)` along the checkpoint grid; empty for
    /// central-limit runs.
    pub trajectory: Vec<(u64, f64)>,
    /// Standardized replication sums, in replication order; empty except
    /// for central-limit runs.
    pub statistics: Vec<f64>,
    /// Law of large numbers: final centered mean. Central limit:
    /// Kolmogorov-Smirnov distance. Iterated logarithm: running maximum
    /// of the normalized statistic.
    pub final_statistic: f64,
    pub stat_mean: Option<f64>,
    pub stat_variance: Option<f64>,
}

/// Geometric checkpoint grid from `start` to `n`: about 5% spacing,
/// always ending at `n`.
fn checkpoints(start: u64, n: u64) -> Vec<u64> {
    let mut grid = Vec::new();
    let mut k = start.clamp(1, n);
    loop {
        grid.push(k);
        if k == n {
            return grid;
        }
        k = (k + (k / 20).max(1)).min(n);
    }
}

/// Sum with a fixed, input-independent association order.
fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        let mut acc = 0.0;
        for x in xs {
            acc += x;
        }
        acc
    } else {
        let (a, b) = xs.split_at(xs.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// Sampler plus centered support values for one coordinate.
struct CoordTable {
    sampler: TableSampler,
    centered: Vec<f64>,
    variance: BigRational,
}

fn coord_table(range: &RangeSpec, m: &CoordinateMeasure) -> Result<CoordTable, LimitError> {
    let moments = m.moments(range)?;
    let centered = range
        .support()
        .iter()
        .map(|x| {
            (x - &moments.mean)
                .to_f64()
                .expect("support values are finite")
        })
        .collect();
    Ok(CoordTable {
        sampler: TableSampler::new(m.probs()),
        centered,
        variance: moments.variance,
    })
}

fn rational_f64(x: &BigRational) -> f64 {
    x.to_f64().expect("finite rational")
}

/// Simulates the running centered mean `(1/k) Σ_{i<=k} (X_i - E X_i)`
/// along a checkpoint grid up to `n`.
///
/// For a varying sequence the variance condition `Σ variance(i)/i² < ∞`
/// must be certified by the declared bound first; identical sequences
/// satisfy it automatically (constant numerators against `1/i²`).
pub fn run_lln(spec: &SequenceSpec, n: u64, seed: u64) -> Result<SimulationReport, LimitError> {
    if n == 0 {
        return Err(LimitError::EmptyExperiment);
    }
    spec.check_n(n)?;
    if !spec.is_identical() {
        let vs = VarianceSequence::from_spec(spec)?;
        let report = kolmogorov_condition(&vs, 1000.min(spec.horizon).max(100));
        if report.verdict != Convergence::Convergent {
            return Err(LimitError::VarianceConditionUndecided);
        }
    }
    let first = spec.moments_at(1)?;
    let identical_table = if spec.is_identical() {
        Some(coord_table(&spec.range, &spec.measure_at(1))?)
    } else {
        None
    };
    let grid = checkpoints(1, n);
    let mut trajectory = Vec::with_capacity(grid.len());
    let mut next_checkpoint = 0;
    let mut sum = 0.0f64;
    let mut variance_sum = BigRational::zero();
    let mut scratch;
    for k in 1..=n {
        let table = match &identical_table {
            Some(t) => t,
            None => {
                scratch = coord_table(&spec.range, &spec.measure_at(k))?;
                &scratch
            }
        };
        let j = table.sampler.sample(keyed_u64(seed, 0, k));
        sum += table.centered[j];
        if identical_table.is_none() {
            variance_sum += &table.variance;
        }
        if grid[next_checkpoint] == k {
            trajectory.push((k, sum / k as f64));
            next_checkpoint += 1;
        }
    }
    if let Some(t) = &identical_table {
        variance_sum = &t.variance * BigRational::from_integer(n.into());
    }
    let final_statistic = trajectory.last().expect("grid ends at n").1;
    Ok(SimulationReport {
        mode: Mode::Lln,
        n,
        replications: 1,
        seed,
        coord_mean: first.mean,
        coord_variance: first.variance,
        variance_sum,
        trajectory,
        statistics: vec![],
        final_statistic,
        stat_mean: None,
        stat_variance: None,
    })
}

/// Draws `replications` standardized sums `Σ_{i<=n}(X_i - E X_i) / B_n`
/// with `B_n² = Σ_{i<=n} variance(i)` and reports their
/// Kolmogorov-Smirnov distance from the standard normal.
///
/// A gate, when given, bounds the exact Lindeberg sum at length `n`
/// before any sampling. Varying sequences must pass a gate; identical
/// ones may skip it, since a fixed square-integrable table satisfies the
/// condition along `n -> ∞` on its own.
pub fn run_clt(
    spec: &SequenceSpec,
    n: u64,
    replications: u64,
    seed: u64,
    gate: Option<&LindebergGate>,
) -> Result<SimulationReport, LimitError> {
    if n == 0 || replications == 0 {
        return Err(LimitError::EmptyExperiment);
    }
    spec.check_n(n)?;
    if gate.is_none() && !spec.is_identical() {
        return Err(LimitError::ConditionRequired);
    }
    if let Some(gate) = gate {
        let value = lindeberg_sum(spec, n, &gate.epsilon)?;
        if value > gate.threshold {
            return Err(LimitError::LindebergExceeded {
                value,
                threshold: gate.threshold.clone(),
            });
        }
    }
    let first = spec.moments_at(1)?;
    let tables: Vec<CoordTable> = if spec.is_identical() {
        vec![coord_table(&spec.range, &spec.measure_at(1))?]
    } else {
        (1..=n)
            .map(|k| coord_table(&spec.range, &spec.measure_at(k)))
            .collect::<Result<_, _>>()?
    };
    let table_at = |k: u64| -> &CoordTable {
        if tables.len() == 1 {
            &tables[0]
        } else {
            &tables[(k - 1) as usize]
        }
    };
    let variance_sum: BigRational = if tables.len() == 1 {
        &tables[0].variance * BigRational::from_integer(n.into())
    } else {
        tables.iter().map(|t| &t.variance).sum()
    };
    if variance_sum.is_zero() {
        return Err(LimitError::ZeroVariance);
    }
    let b_n = rational_f64(&variance_sum).sqrt();

    let statistics: Vec<f64> = (0..replications)
        .into_par_iter()
        .map(|rep| {
            let mut values = Vec::with_capacity(n as usize);
            for k in 1..=n {
                let t = table_at(k);
                values.push(t.centered[t.sampler.sample(keyed_u64(seed, rep, k))]);
            }
            pairwise_sum(&values) / b_n
        })
        .collect();

    let mut sorted = statistics.clone();
    sorted.sort_unstable_by(f64::total_cmp);
    let ks = ks_distance_to_standard_normal(&sorted);
    let reps = replications as f64;
    let stat_mean = pairwise_sum(&statistics) / reps;
    let stat_variance = if replications >= 2 {
        let sq: Vec<f64> = statistics
            .iter()
            .map(|x| (x - stat_mean) * (x - stat_mean))
            .collect();
        Some(pairwise_sum(&sq) / (reps - 1.0))
    } else {
        None
    };
    Ok(SimulationReport {
        mode: Mode::Clt,
        n,
        replications,
        seed,
        coord_mean: first.mean,
        coord_variance: first.variance,
        variance_sum,
        trajectory: vec![],
        statistics,
        final_statistic: ks,
        stat_mean: Some(stat_mean),
        stat_variance,
    })
}

/// Tracks `Σ_{i<=k}(X_i - E X_i) / sqrt(2 B_k² ln ln k)` with
/// Simulates the normalized partial sums along a checkpoint grid
/// starting at 100, reporting the trajectory and its running maximum.
///
/// Identical coordinates use the classical normalization
/// `sqrt(2 variance · k · ln ln k)`. A per-coordinate rule instead uses
/// `sqrt(2 B_k² · ln ln B_k)` with `B_k² = Σ_{i<=k} variance(i)`; the
/// two laws differ inside the iterated logarithm, so a varying rule
/// that happens to be constant tracks the identical run only up to
/// that factor. `B_k²` is accumulated exactly and rounded once per
/// checkpoint. Checkpoints where the normalization has no positive
/// value (a varying rule with `B_k <= 1`) are skipped.
pub fn run_lil(spec: &SequenceSpec, n: u64, seed: u64) -> Result<SimulationReport, LimitError> {
    const MIN_N: u64 = 100;
    if n < MIN_N {
        return Err(LimitError::TooShort { n, min: MIN_N });
    }
    spec.check_n(n)?;
    let first = spec.moments_at(1)?;
    let identical_table = if spec.is_identical() {
        let t = coord_table(&spec.range, &spec.measure_at(1))?;
        if t.variance.is_zero() {
            return Err(LimitError::ZeroVariance);
        }
        Some(t)
    } else {
        None
    };
    let grid = checkpoints(MIN_N, n);
    let mut next_checkpoint = 0;
    let mut trajectory = Vec::with_capacity(grid.len());
    let mut running_max = f64::NEG_INFINITY;
    let mut sum = 0.0f64;
    let mut variance_sum = BigRational::zero();
    let mut scratch;
    for k in 1..=n {
        let table = match &identical_table {
            Some(t) => t,
            None => {
                scratch = coord_table(&spec.range, &spec.measure_at(k))?;
                &scratch
            }
        };
        let j = table.sampler.sample(keyed_u64(seed, 0, k));
        sum += table.centered[j];
        variance_sum += &table.variance;
        if grid[next_checkpoint] == k {
            next_checkpoint += 1;
            let b2 = rational_f64(&variance_sum);
            let loglog = if identical_table.is_some() {
                (k as f64).ln().ln()
            } else {
                b2.sqrt().ln().ln()
            };
            let denom = (2.0 * b2 * loglog).sqrt();
            if denom.is_finite() && denom > 0.0 {
                let stat = sum / denom;
                trajectory.push((k, stat));
                running_max = running_max.max(stat);
            }
        }
    }
    if trajectory.is_empty() {
        // Identical mode cannot get here (nonzero variance is checked up
        // front and ln ln k > 0 from 100 on); a varying rule does when
        // its variance sum never climbs past B_k = 1.
        return Err(if variance_sum.is_zero() {
            LimitError::ZeroVariance
        } else {
            LimitError::NormalizationUndefined
        });
    }
    Ok(SimulationReport {
        mode: Mode::Lil,
        n,
        replications: 1,
        seed,
        coord_mean: first.mean,
        coord_variance: first.variance,
        variance_sum,
        trajectory,
        statistics: vec![],
        final_statistic: running_max,
        stat_mean: None,
        stat_variance: None,
    })
}

/// The exact Lindeberg sum at length `n`:
/// `(1/B_n²) Σ_{i<=n} E[(X_i - E X_i)² ; (X_i - E X_i)² > ε² B_n²]`
/// with `B_n² = Σ_{i<=n} variance(i)`.
///
/// The truncation uses the strict inequality on squares, so the value is
/// a single exact rational. Identical sequences reduce to one
/// coordinate: `n` equal terms over `B_n² = n · variance`.
pub fn lindeberg_sum(
    spec: &SequenceSpec,
    n: u64,
    epsilon: &BigRational,
) -> Result<BigRational, LimitError> {
    if epsilon <= &BigRational::zero() {
        return Err(LimitError::InvalidEpsilon);
    }
    if n == 0 {
        return Err(LimitError::EmptyExperiment);
    }
    spec.check_n(n)?;
    let eps2 = epsilon * epsilon;
    let truncated = |m: &Moments, measure: &CoordinateMeasure, b2: &BigRational| {
        spec.range
            .support()
            .iter()
            .zip(measure.probs())
            .map(|(x, p)| {
                let d = x - &m.mean;
                let d2 = &d * &d;
                if d2 > &eps2 * b2 {
                    d2 * p
                } else {
                    BigRational::zero()
                }
            })
            .sum::<BigRational>()
    };
    if spec.is_identical() {
        let measure = spec.measure_at(1);
        let m = measure.moments(&spec.range)?;
        if m.variance.is_zero() {
            return Err(LimitError::ZeroVariance);
        }
        let b2 = &m.variance * BigRational::from_integer(n.into());
        // n identical terms over n * variance.
        return Ok(truncated(&m, &measure, &b2) / &m.variance);
    }
    let per_coord: Vec<(Moments, CoordinateMeasure)> = (1..=n)
        .map(|k| {
            let measure = spec.measure_at(k);
            measure.moments(&spec.range).map(|m| (m, measure))
        })
        .collect::<Result<_, _>>()?;
    let b2: BigRational = per_coord.iter().map(|(m, _)| &m.variance).sum();
    if b2.is_zero() {
        return Err(LimitError::ZeroVariance);
    }
    let total: BigRational = per_coord
        .iter()
        .map(|(m, measure)| truncated(m, measure, &b2))
        .sum();
    Ok(total / b2)
}

/// The raw sample path `X_1, .., X_n` of replication 0, as floats.
pub fn sample_path(spec: &SequenceSpec, n: u64, seed: u64) -> Result<Vec<f64>, LimitError> {
    if n == 0 {
        return Err(LimitError::EmptyExperiment);
    }
    spec.check_n(n)?;
    let support_f64: Vec<f64> = spec.range.support().iter().map(rational_f64).collect();
    let mut out = Vec::with_capacity(n as usize);
    if spec.is_identical() {
        let sampler = TableSampler::new(spec.measure_at(1).probs());
        for k in 1..=n {
            out.push(support_f64[sampler.sample(keyed_u64(seed, 0, k))]);
        }
    } else {
        for k in 1..=n {
            let measure = spec.measure_at(k);
            measure.moments(&spec.range)?;
            let sampler = TableSampler::new(measure.probs());
            out.push(support_f64[sampler.sample(keyed_u64(seed, 0, k))]);
        }
    }
    Ok(out)
}
