//! Monte-Carlo comparison of meta-analytic Bayes factors against the Bayes
//! factor of the pooled data.
//!
//! Every replicate simulates one full dataset, computes the pooled g-prior
//! (g = N) and JZS Bayes factors, splits the data into K studies and runs all
//! four synthesis methods on the per-study summaries. Replicates draw from
//! their own ChaCha20 stream (stream index = replicate index) and are reduced
//! in replicate order, so results do not depend on the number of workers.

mod output;
mod scenario;

pub use output::{clip_for_plot, write_metrics_csv, write_replicates_csv, CLIP_RANGE, RNG_NAME};
pub use scenario::{load_scenarios, parse_scenarios, Model, Partition, SampleSize, ScenarioSpec, MIN_PART_SIZE};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::bf::{gprior_bf10_from_t, jzs_bf10, GPrior, LogBf, Orientation};
use crate::distributions::DegreesOfFreedom;
use crate::error::{Error, Result};
use crate::evidence::{classify, weighted_kappa, AgreementTable};
use crate::rawdata::SimpleRegression;
use crate::synthesis::{meta_bf, MetaMethod, MetaOptions, Reported, StudyRecord};

/// Environment variable read for the worker count when none is given.
pub const WORKERS_ENV: &str = "BFMETA_WORKERS";

/// Raw observations of one replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedData {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl SimulatedData {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

/// The generator used for replicate `replicate` of a scenario seeded with `seed`.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// Draws N (when it is random) and then a dataset with y ~ N(βx, 1).
///
/// The two-sample design alternates x = 0, 1, 0, 1, … so both groups are
/// balanced overall and inside every contiguous block. The regression design
/// draws x from N(0, 1/4).
pub fn generate_dataset<R: Rng + ?Sized>(spec: &ScenarioSpec, rng: &mut R) -> SimulatedData {
    let n = match spec.n {
        SampleSize::Fixed(n) => n,
        SampleSize::Range { min, max } => rng.random_range(min..=max),
    };
    let x: Vec<f64> = match spec.model {
        Model::TwoSampleTTest => (0..n).map(|i| (i % 2) as f64).collect(),
        Model::SimpleRegression => {
            let d = Normal::new(0.0, 0.5).expect("valid normal");
            (0..n).map(|_| d.sample(rng)).collect()
        }
    };
    let y = x
        .iter()
        .map(|&xi| spec.beta * xi + rng.sample::<f64, _>(StandardNormal))
        .collect();
    SimulatedData { x, y }
}

/// Study sizes for `n` observations, in data order.
///
/// Fixed allocations use largest-remainder rounding of ω²_k·N (ties go to
/// the earlier study); the random scheme picks a composition uniformly among
/// those with every part at least [`MIN_PART_SIZE`].
pub fn partition_sizes<R: Rng + ?Sized>(n: usize, partition: &Partition, k: usize, rng: &mut R) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(Error::Config("K must be positive".into()));
    }
    let sizes = match partition {
        Partition::Equal => (0..k).map(|i| n / k + usize::from(i < n % k)).collect(),
        Partition::Unequal(w) => {
            if w.len() != k {
                return Err(Error::Config(format!("{} weights for K = {k}", w.len())));
            }
            largest_remainder(n, w)
        }
        Partition::Random => {
            if n < MIN_PART_SIZE * k {
                return Err(Error::Config(format!("N = {n} is too small for {k} studies")));
            }
            // Parts of at least MIN_PART_SIZE ↔ parts c_k ≥ 1 summing to m.
            let m = n - (MIN_PART_SIZE - 1) * k;
            let mut cuts: Vec<usize> = index::sample(rng, m - 1, k - 1).into_iter().map(|c| c + 1).collect();
            cuts.sort_unstable();
            let mut sizes = Vec::with_capacity(k);
            let mut last = 0;
            for c in cuts.into_iter().chain(std::iter::once(m)) {
                sizes.push(c - last + MIN_PART_SIZE - 1);
                last = c;
            }
            sizes
        }
    };
    if let Some((i, &s)) = sizes.iter().enumerate().find(|(_, &s)| s < MIN_PART_SIZE) {
        return Err(Error::Config(format!(
            "study {} would have {s} observations (minimum {MIN_PART_SIZE})",
            i + 1
        )));
    }
    Ok(sizes)
}

fn largest_remainder(n: usize, w: &[f64]) -> Vec<usize> {
    let quotas: Vec<f64> = w.iter().map(|&x| x * n as f64).collect();
    let mut sizes: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = sizes.iter().sum();
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| {
        let (fa, fb) = (quotas[a] - quotas[a].floor(), quotas[b] - quotas[b].floor());
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().cycle().take(n.saturating_sub(assigned)) {
        sizes[i] += 1;
    }
    sizes
}

/// Splits the data into contiguous studies of the given sizes.
pub fn split<'a>(data: &'a SimulatedData, sizes: &[usize]) -> Vec<(&'a [f64], &'a [f64])> {
    let mut start = 0;
    sizes
        .iter()
        .map(|&s| {
            let part = (&data.x[start..start + s], &data.y[start..start + s]);
            start += s;
            part
        })
        .collect()
}

/// Summary of one simulated study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartSummary {
    pub t: f64,
    pub n: usize,
    pub ss_x: f64,
    /// `2 ln BF10` under the g-prior with g = n_k.
    pub two_log_bf_g: f64,
    pub two_log_bf_jzs: f64,
}

/// Everything computed for one successful replicate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateOutcome {
    pub replicate: usize,
    pub n_total: usize,
    pub full_t: f64,
    /// Pooled-data g-prior Bayes factor with g = N.
    pub full_g: LogBf<f64>,
    pub full_jzs: LogBf<f64>,
    /// Indexed like [`MetaMethod::ALL`].
    pub meta: [LogBf<f64>; 4],
    pub studies: Vec<PartSummary>,
}

impl ReplicateOutcome {
    pub fn meta_for(&self, method: MetaMethod) -> LogBf<f64> {
        self.meta[method_index(method)]
    }

    /// The pooled-data factor a method is judged against.
    pub fn reference_for(&self, method: MetaMethod) -> LogBf<f64> {
        match method {
            MetaMethod::Jzs => self.full_jzs,
            _ => self.full_g,
        }
    }

    /// Σ_k 2 ln BF_k over the studies' own g-prior factors.
    pub fn product_of_study_bfs(&self) -> f64 {
        self.studies.iter().map(|s| s.two_log_bf_g).sum()
    }
}

fn method_index(method: MetaMethod) -> usize {
    MetaMethod::ALL.iter().position(|&m| m == method).expect("listed method")
}

/// A step that failed inside a replicate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateFailure {
    pub replicate: usize,
    /// `pooled`, `study`, or a method key.
    pub stage: String,
    pub message: String,
}

/// Bias, RMSE and agreement of one method over the usable replicates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsSummary {
    pub method: MetaMethod,
    pub replicates_used: usize,
    /// Replicates in which this method itself failed.
    pub failures: usize,
    pub mean_full: f64,
    pub mean_meta: f64,
    pub bias: f64,
    pub rmse: f64,
    /// `None` when κ is undefined (both sides in a single category).
    pub kappa: Option<f64>,
    pub kappa_orientation: Orientation,
    pub agreement: AgreementTable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioResult {
    pub spec: ScenarioSpec,
    pub summaries: Vec<MetricsSummary>,
    pub outcomes: Vec<ReplicateOutcome>,
    pub failures: Vec<ReplicateFailure>,
}

impl ScenarioResult {
    pub fn summary(&self, method: MetaMethod) -> &MetricsSummary {
        &self.summaries[method_index(method)]
    }
}

/// Worker count: explicit value, else the environment variable, else all cores.
pub fn resolve_workers(explicit: Option<usize>) -> Result<usize> {
    if let Some(w) = explicit {
        return if w == 0 { Err(Error::Config("worker count must be positive".into())) } else { Ok(w) };
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(w) if w > 0 => Ok(w),
            _ => Err(Error::Config(format!("{WORKERS_ENV} must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

/// Runs every replicate of a scenario and aggregates the metrics.
pub fn run_scenario(spec: &ScenarioSpec, workers: Option<usize>) -> Result<ScenarioResult> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(resolve_workers(workers)?)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let per_replicate: Vec<std::result::Result<ReplicateOutcome, Vec<ReplicateFailure>>> =
        pool.install(|| (0..spec.replicates).into_par_iter().map(|r| run_replicate(spec, r)).collect());

    let mut outcomes = Vec::with_capacity(spec.replicates);
    let mut failures = Vec::new();
    for r in per_replicate {
        match r {
            Ok(o) => outcomes.push(o),
            Err(f) => failures.extend(f),
        }
    }
    let summaries = MetaMethod::ALL
        .iter()
        .map(|&m| summarize(spec, m, &outcomes, &failures))
        .collect();
    Ok(ScenarioResult {
        spec: spec.clone(),
        summaries,
        outcomes,
        failures,
    })
}

/// Runs several scenarios one after another.
pub fn run_scenarios(specs: &[ScenarioSpec], workers: Option<usize>) -> Result<Vec<ScenarioResult>> {
    specs.iter().map(|s| run_scenario(s, workers)).collect()
}

/// One replicate, computed from its own random stream.
pub fn run_replicate(spec: &ScenarioSpec, replicate: usize) -> std::result::Result<ReplicateOutcome, Vec<ReplicateFailure>> {
    let mut rng = replicate_rng(spec.seed, replicate as u64);
    let fail = |stage: &str, e: Error| ReplicateFailure {
        replicate,
        stage: stage.to_string(),
        message: e.to_string(),
    };

    let data = generate_dataset(spec, &mut rng);
    let n_total = data.len();
    let sizes = partition_sizes(n_total, &spec.partition, spec.k, &mut rng).map_err(|e| vec![fail("partition", e)])?;

    let (full_t, full_g, full_jzs) = pooled_factors(&data).map_err(|e| vec![fail("pooled", e)])?;

    let mut studies = Vec::with_capacity(spec.k);
    let mut records = Vec::with_capacity(spec.k);
    for (i, (x, y)) in split(&data, &sizes).into_iter().enumerate() {
        let part = study_summary(x, y).map_err(|e| vec![fail("study", e)])?;
        records.push(StudyRecord::new(format!("S{}", i + 1), Reported::TStat { t: part.t }, part.n).with_ss_x(part.ss_x));
        studies.push(part);
    }

    let opts = MetaOptions::default();
    let mut meta = [LogBf::bf10(f64::NAN); 4];
    let mut errors = Vec::new();
    for (slot, &m) in meta.iter_mut().zip(MetaMethod::ALL.iter()) {
        match meta_bf(m, &records, &opts) {
            Ok(r) => *slot = r.meta_bf,
            Err(e) => errors.push(fail(m.key(), e)),
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    Ok(ReplicateOutcome {
        replicate,
        n_total,
        full_t,
        full_g,
        full_jzs,
        meta,
        studies,
    })
}

fn pooled_factors(data: &SimulatedData) -> Result<(f64, LogBf<f64>, LogBf<f64>)> {
    let fit = SimpleRegression::fit(&data.x, &data.y)?;
    let n = fit.n;
    let t = fit.t_stat();
    let g = gprior_bf10_from_t(t * t, n, GPrior::unit_information(n)?)?;
    let jzs = jzs_bf10(t, DegreesOfFreedom::from_sample_size(n)?, fit.sxx)?;
    Ok((t, g, jzs))
}

fn study_summary(x: &[f64], y: &[f64]) -> Result<PartSummary> {
    let fit = SimpleRegression::fit(x, y)?;
    let t = fit.t_stat();
    let g = gprior_bf10_from_t(t * t, fit.n, GPrior::unit_information(fit.n)?)?;
    let jzs = jzs_bf10(t, DegreesOfFreedom::from_sample_size(fit.n)?, fit.sxx)?;
    Ok(PartSummary {
        t,
        n: fit.n,
        ss_x: fit.sxx,
        two_log_bf_g: g.two_log_bf,
        two_log_bf_jzs: jzs.two_log_bf,
    })
}

/// Orientation used to grade agreement: under β = 0 the interesting
/// evidence is for H0, so both factors are read as BF01.
pub fn kappa_orientation(beta: f64) -> Orientation {
    if beta == 0.0 {
        Orientation::Bf01
    } else {
        Orientation::Bf10
    }
}

fn summarize(spec: &ScenarioSpec, method: MetaMethod, outcomes: &[ReplicateOutcome], failures: &[ReplicateFailure]) -> MetricsSummary {
    let orientation = kappa_orientation(spec.beta);
    let used = outcomes.len();
    let (mut sum_full, mut sum_meta, mut sum_d, mut sum_d2) = (0.0, 0.0, 0.0, 0.0);
    let mut pairs = Vec::with_capacity(used);
    for o in outcomes {
        let (full, meta) = (o.reference_for(method), o.meta_for(method));
        let d = meta.two_log_bf10() - full.two_log_bf10();
        sum_full += full.two_log_bf10();
        sum_meta += meta.two_log_bf10();
        sum_d += d;
        sum_d2 += d * d;
        pairs.push((classify(full.oriented(orientation)), classify(meta.oriented(orientation))));
    }
    let agreement = AgreementTable::from_levels(pairs);
    let nf = used as f64;
    MetricsSummary {
        method,
        replicates_used: used,
        failures: failures.iter().filter(|f| f.stage == method.key()).count(),
        mean_full: sum_full / nf,
        mean_meta: sum_meta / nf,
        bias: sum_d / nf,
        rmse: (sum_d2 / nf).sqrt(),
        kappa: weighted_kappa(&agreement).ok(),
        kappa_orientation: orientation,
        agreement,
    }
}
