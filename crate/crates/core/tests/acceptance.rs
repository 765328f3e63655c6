//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line for
//! each, and exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use bfmeta::bf::{gprior_bf10_from_r2, gprior_bf10_from_t, jzs_bf10, GPrior};
use bfmeta::distributions::{nct_pdf, t_pdf, DegreesOfFreedom, Noncentrality};
use bfmeta::io::ingest_csv;
use bfmeta::quadrature::{integrate, Tolerance};
use bfmeta::rawdata::{nig_bf10_rawdata, RawDataset, SimpleRegression};
use bfmeta::simulation::{
    run_replicate, run_scenario, write_metrics_csv, Model, Partition, SampleSize, ScenarioResult, ScenarioSpec,
};
use bfmeta::synthesis::{
    meta_bf, normalize_to_abs_t, sample_fraction_weights, variance_weights, MetaMethod, MetaOptions, NuRule,
    Reported, StudyRecord,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

// Per-study golden columns of the twenty-trial example.
const TWO_LOG_BF_G: [f64; 20] = [
    -3.9, -3.2, 2.1, -2.5, 6.2, -4.2, -4.4, -5.8, -4.3, -1.1, -4.0, -1.1, 1.6, -2.6, -5.4, -1.4, -6.0, 0.1, -4.4, -3.4,
];
const TWO_LOG_BF_JZS: [f64; 20] = [
    -3.1, -2.5, 2.5, -1.9, 5.4, -3.3, -3.6, -3.9, -3.4, -0.5, -3.1, -0.3, 2.4, -1.8, -3.8, -1.0, -4.5, 0.2, -3.5, -2.6,
];
const W2_OMEGA: [f64; 20] = [
    0.015, 0.009, 0.019, 0.006, 0.005, 0.019, 0.047, 0.178, 0.021, 0.014, 0.033, 0.104, 0.069, 0.029, 0.269, 0.007, 0.117,
    0.006, 0.022, 0.011,
];
const W2_V: [f64; 20] = [
    0.022, 0.013, 0.026, 0.008, 0.004, 0.027, 0.069, 0.095, 0.030, 0.020, 0.042, 0.150, 0.093, 0.042, 0.198, 0.009, 0.097,
    0.007, 0.032, 0.015,
];
const TABLE_BF_TOL: f64 = 0.05;
const TABLE_WEIGHT_TOL: f64 = 0.0005;

const META_P: f64 = 9.00;
const META_L: f64 = 9.64;
const META_D: f64 = 11.83;
const META_JZS: f64 = 12.75;
const META_TIGHT_TOL: f64 = 0.02;
const META_LOOSE_TOL: f64 = 0.15;

const R2_VS_T_TOL: f64 = 1e-10;
const RAW_VS_N_EXPONENT_TOL: f64 = 1e-8;
const RAW_VS_TEXTBOOK_TOL: f64 = 0.05;

const DENSITY_MASS_TOL: f64 = 1e-6;
const CENTRAL_REDUCTION_TOL: f64 = 1e-12;
const SINGLE_STUDY_JZS_TOL: f64 = 1e-10;

const PRODUCT_GAP: f64 = 1.0;

const KAPPA_FLOOR: f64 = 0.8;
/// κ_L must sit at least this far below κ_D to count as materially lower.
const KAPPA_MATERIAL_GAP: f64 = 0.1;
const FIXED_N_REPLICATES: usize = 200;

const RANDOM_N_REPLICATES: usize = 100;
const RANDOM_N_K: [usize; 4] = [2, 10, 25, 50];
const RANDOM_N_BETA: [f64; 4] = [0.0, 0.1, 0.2, 0.3];

const SEED: u64 = 20_240_501;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn fixture() -> Vec<StudyRecord> {
    ingest_csv(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/bolier2013.csv")).expect("fixture parses")
}

fn worked_example_columns() -> Outcome {
    let recs = fixture();
    let mut misses = Vec::new();
    let mut inputs = Vec::new();
    for (k, r) in recs.iter().enumerate() {
        let s = normalize_to_abs_t(r, NuRule::TwoSample).unwrap();
        let ss = s.ss_x.unwrap();
        let g = gprior_bf10_from_t(s.abs_t * s.abs_t, s.n, GPrior::new(s.n as f64).unwrap()).unwrap().two_log_bf;
        let t = match r.reported {
            Reported::TStat { t } => t,
            _ => unreachable!("fixture holds t statistics"),
        };
        let j = jzs_bf10(t, DegreesOfFreedom::new(s.nu).unwrap(), ss).unwrap().two_log_bf;
        if (g - TWO_LOG_BF_G[k]).abs() > TABLE_BF_TOL {
            misses.push(format!("g study {}: {g:.3}", k + 1));
        }
        if (j - TWO_LOG_BF_JZS[k]).abs() > TABLE_BF_TOL {
            misses.push(format!("jzs study {}: {j:.3}", k + 1));
        }
        inputs.push((s.abs_t, s.nu, ss));
    }
    let n: Vec<usize> = recs.iter().map(|r| r.n).collect();
    let omega = sample_fraction_weights(&n).unwrap().squared();
    let v = variance_weights(&inputs).unwrap().squared();
    for k in 0..recs.len() {
        if (omega[k] - W2_OMEGA[k]).abs() > TABLE_WEIGHT_TOL {
            misses.push(format!("w2_omega study {}: {:.4}", k + 1, omega[k]));
        }
        if (v[k] - W2_V[k]).abs() > TABLE_WEIGHT_TOL {
            misses.push(format!("w2_v study {}: {:.4} vs {:.3}", k + 1, v[k], W2_V[k]));
        }
    }
    let six = gprior_bf10_from_t(0.0, 66, GPrior::new(66.0).unwrap()).unwrap().two_log_bf;
    let nineteen = gprior_bf10_from_t(0.0, 78, GPrior::new(78.0).unwrap()).unwrap().two_log_bf;
    if (six + 67f64.ln()).abs() > 1e-12 || (nineteen + 79f64.ln()).abs() > 1e-12 {
        misses.push(format!("anchors: {six} {nineteen}"));
    }
    if recs.len() != 20 {
        misses.push(format!("{} studies", recs.len()));
    }
    if misses.is_empty() {
        Outcome::new(true, "all 20 rows within tolerance; anchors -ln 67, -ln 79 exact")
    } else {
        Outcome::new(false, misses.join("; "))
    }
}

fn worked_example_meta() -> Outcome {
    let recs = fixture();
    let opts = MetaOptions::default();
    let get = |m| meta_bf(m, &recs, &opts).unwrap().meta_bf.two_log_bf;
    let (p, l, d, j) = (
        get(MetaMethod::GPartial),
        get(MetaMethod::GLimited),
        get(MetaMethod::GDetailed),
        get(MetaMethod::Jzs),
    );
    let pass = (p - META_P).abs() <= META_TIGHT_TOL
        && (l - META_L).abs() <= META_TIGHT_TOL
        && (d - META_D).abs() <= META_LOOSE_TOL
        && (j - META_JZS).abs() <= META_LOOSE_TOL;
    Outcome::new(
        pass,
        format!(
            "P {p:.4} (Δ {:+.4}), L {l:.4} (Δ {:+.4}), D {d:.4} (Δ {:+.4}), JZS {j:.4} (Δ {:+.4})",
            p - META_P,
            l - META_L,
            d - META_D,
            j - META_JZS
        ),
    )
}

fn regression_data(rng: &mut ChaCha20Rng, n: usize, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let x: Vec<f64> = (0..n).map(|_| 0.5 * rng.sample::<f64, _>(StandardNormal)).collect();
    let y = x.iter().map(|&xi| 0.3 + beta * xi + rng.sample::<f64, _>(StandardNormal)).collect();
    (x, y)
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(SEED);
    let mut worst_t = 0.0f64;
    let mut worst_raw = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(10..=500);
        let beta = rng.random_range(-0.6..0.6);
        let (x, y) = regression_data(&mut rng, n, beta);
        let fit = SimpleRegression::fit(&x, &y).unwrap();
        let g = GPrior::new(n as f64).unwrap();
        let from_r2 = gprior_bf10_from_r2(n, 1, fit.r2(), g).unwrap().two_log_bf;
        let t = fit.t_stat();
        let from_t = gprior_bf10_from_t(t * t, n, g).unwrap().two_log_bf;
        worst_t = worst_t.max((from_r2 - from_t).abs());

        let data = RawDataset::with_intercept(DVector::from_vec(y), DMatrix::from_vec(n, 1, x)).unwrap();
        let v = data.g_prior_covariance(n as f64).unwrap();
        let raw = nig_bf10_rawdata(&data, &v).unwrap().two_log_bf;
        let r2 = data.partial_r2().unwrap();
        let nf = n as f64;
        let g = nf;
        let n_exponent = (nf - 1.0) * g.ln_1p() - nf * (g * (1.0 - r2)).ln_1p();
        worst_raw = worst_raw.max((raw - n_exponent).abs());
    }

    let (x, y) = regression_data(&mut rng, 1000, 0.15);
    let data = RawDataset::with_intercept(DVector::from_vec(y), DMatrix::from_vec(1000, 1, x)).unwrap();
    let raw = nig_bf10_rawdata(&data, &data.g_prior_covariance(1000.0).unwrap()).unwrap().two_log_bf;
    let textbook = gprior_bf10_from_r2(1000, 1, data.partial_r2().unwrap(), GPrior::new(1000.0).unwrap())
        .unwrap()
        .two_log_bf;
    let gap = (raw - textbook).abs();
    Outcome::new(
        worst_t <= R2_VS_T_TOL && worst_raw <= RAW_VS_N_EXPONENT_TOL && gap <= RAW_VS_TEXTBOOK_TOL,
        format!("R² vs T max Δ {worst_t:.2e}; raw vs n-exponent max Δ {worst_raw:.2e}; raw vs n−1 form at n=1000 Δ {gap:.4}"),
    )
}

fn density_contracts() -> Outcome {
    let mut worst_mass = 0.0f64;
    for nu in [3.0, 14.0, 100.0] {
        for delta in [-5.0, 0.0, 2.0, 10.0] {
            let dof = DegreesOfFreedom::new(nu).unwrap();
            let nc = Noncentrality::new(delta).unwrap();
            // t = tan(θ) maps the real line onto (−π/2, π/2).
            let f = |th: f64| {
                let c = th.cos();
                if c == 0.0 {
                    0.0
                } else {
                    nct_pdf(th.tan(), dof, nc) / (c * c)
                }
            };
            let half = std::f64::consts::FRAC_PI_2;
            let mass = integrate(f, -half, half, Tolerance::new(1e-13, 1e-11, 1 << 15)).unwrap().value;
            worst_mass = worst_mass.max((mass - 1.0).abs());
        }
    }
    let mut worst_central = 0.0f64;
    for nu in [1.0, 3.0, 14.0, 100.0] {
        let dof = DegreesOfFreedom::new(nu).unwrap();
        for i in -100..=100 {
            let t = i as f64 * 0.1;
            let a = nct_pdf(t, dof, Noncentrality::new(0.0).unwrap());
            worst_central = worst_central.max((a - t_pdf(t, dof)).abs());
        }
    }
    let mut worst_single = 0.0f64;
    for (t, n1, n2) in [(3.6, 8, 8), (-0.22, 27, 26), (0.0, 37, 29), (2.58, 33, 32), (-1.1, 120, 95)] {
        let rec = StudyRecord::two_sample_t("s", t, n1, n2);
        let n = n1 + n2;
        let ss = rec.covariate_ss().unwrap();
        let single = jzs_bf10(t, DegreesOfFreedom::from_sample_size(n).unwrap(), ss).unwrap().two_log_bf;
        let meta = meta_bf(MetaMethod::Jzs, &[rec], &MetaOptions::default()).unwrap().meta_bf.two_log_bf;
        worst_single = worst_single.max((single - meta).abs());
    }
    Outcome::new(
        worst_mass <= DENSITY_MASS_TOL && worst_central <= CENTRAL_REDUCTION_TOL && worst_single <= SINGLE_STUDY_JZS_TOL,
        format!("mass max Δ {worst_mass:.2e} over 12 (ν, δ); δ=0 max Δ {worst_central:.2e}; K=1 JZS max Δ {worst_single:.2e}"),
    )
}

fn fixed_spec(beta: f64, k: usize, replicates: usize) -> ScenarioSpec {
    ScenarioSpec {
        name: "fixed_eq".into(),
        model: Model::TwoSampleTTest,
        beta,
        k,
        partition: Partition::Equal,
        n: SampleSize::Fixed(1000),
        replicates,
        seed: SEED,
    }
}

fn product_fallacy() -> Outcome {
    let o = run_replicate(&fixed_spec(0.0, 5, 1), 0).expect("replicate succeeds");
    let sum = o.product_of_study_bfs();
    let pooled = o.full_g.two_log_bf;
    Outcome::new(
        (sum - pooled).abs() > PRODUCT_GAP,
        format!("Σ 2lnBF_k = {sum:.3}, pooled 2lnBF = {pooled:.3}, gap {:.3}", (sum - pooled).abs()),
    )
}

fn fixed_n_simulation() -> Outcome {
    let mut failures = Vec::new();
    let mut worst = (f64::INFINITY, String::new());
    let mut gap = None;
    for beta in [0.0, 0.1, 0.2, 0.3] {
        for k in [2, 5, 10] {
            let res = run_scenario(&fixed_spec(beta, k, FIXED_N_REPLICATES), None).unwrap();
            if !res.failures.is_empty() {
                failures.push(format!("β={beta} K={k}: {} failed steps", res.failures.len()));
            }
            for m in [MetaMethod::GDetailed, MetaMethod::GPartial, MetaMethod::Jzs] {
                let kappa = res.summary(m).kappa;
                let value = kappa.unwrap_or(f64::NAN);
                if !(value >= KAPPA_FLOOR) {
                    failures.push(format!("β={beta} K={k} {}: κ {kappa:?}", m.key()));
                }
                if value < worst.0 {
                    worst = (value, format!("{} at β={beta} K={k}", m.key()));
                }
            }
            if beta == 0.0 && k == 10 {
                gap = Some((
                    res.summary(MetaMethod::GLimited).kappa,
                    res.summary(MetaMethod::GDetailed).kappa,
                ));
            }
        }
    }
    let (kl, kd) = gap.expect("β=0, K=10 cell ran");
    let material = matches!((kl, kd), (Some(l), Some(d)) if l <= d - KAPPA_MATERIAL_GAP);
    if !material {
        failures.push(format!("β=0 K=10: κ_L {kl:?} not materially below κ_D {kd:?}"));
    }
    Outcome::new(
        failures.is_empty(),
        format!(
            "min κ(D,P,JZS) {:.3} ({}); β=0 K=10 κ_L {:.3} vs κ_D {:.3}{}",
            worst.0,
            worst.1,
            kl.unwrap_or(f64::NAN),
            kd.unwrap_or(f64::NAN),
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    )
}

fn random_spec(beta: f64, k: usize, replicates: usize) -> ScenarioSpec {
    ScenarioSpec {
        name: "random_n".into(),
        model: Model::TwoSampleTTest,
        beta,
        k,
        partition: Partition::Random,
        n: SampleSize::Range { min: 800, max: 10000 },
        replicates,
        seed: SEED,
    }
}

fn random_n_trends() -> Outcome {
    // [k][β] results
    let results: Vec<Vec<ScenarioResult>> = RANDOM_N_K
        .iter()
        .map(|&k| {
            RANDOM_N_BETA
                .iter()
                .map(|&b| run_scenario(&random_spec(b, k, RANDOM_N_REPLICATES), None).unwrap())
                .collect()
        })
        .collect();
    let over_beta = |k_idx: usize, m: MetaMethod, f: &dyn Fn(f64, f64) -> f64, positive_only: bool| -> f64 {
        let cells: Vec<f64> = RANDOM_N_BETA
            .iter()
            .zip(&results[k_idx])
            .filter(|(b, _)| !positive_only || **b > 0.0)
            .map(|(_, r)| {
                let s = r.summary(m);
                f(s.bias, s.rmse)
            })
            .collect();
        cells.iter().sum::<f64>() / cells.len() as f64
    };
    let abs_bias = |b: f64, _: f64| b.abs();
    let rmse = |_: f64, r: f64| r;
    let bias = |b: f64, _: f64| b;

    let mut failures = Vec::new();
    let p_bias: Vec<f64> = (0..RANDOM_N_K.len()).map(|i| over_beta(i, MetaMethod::GPartial, &abs_bias, false)).collect();
    let p_rmse: Vec<f64> = (0..RANDOM_N_K.len()).map(|i| over_beta(i, MetaMethod::GPartial, &rmse, false)).collect();
    let increasing = |v: &[f64]| v.windows(2).all(|w| w[1] >= w[0]);
    if !increasing(&p_bias) {
        failures.push(format!("P |bias| not increasing in K: {p_bias:.3?}"));
    }
    if !increasing(&p_rmse) {
        failures.push(format!("P RMSE not increasing in K: {p_rmse:.3?}"));
    }
    // D and JZS count as bounded when, at every K, their β-averaged RMSE
    // stays below that of P and grows less from the smallest to the largest K.
    let last = RANDOM_N_K.len() - 1;
    let mut bounded = Vec::new();
    for m in [MetaMethod::GDetailed, MetaMethod::Jzs] {
        let r: Vec<f64> = (0..RANDOM_N_K.len()).map(|i| over_beta(i, m, &rmse, false)).collect();
        for (i, (&own, &partial)) in r.iter().zip(&p_rmse).enumerate() {
            if own > partial {
                failures.push(format!("{} RMSE {own:.3} above P {partial:.3} at K={}", m.key(), RANDOM_N_K[i]));
            }
        }
        let growth = r[last] / r[0];
        if growth > p_rmse[last] / p_rmse[0] {
            failures.push(format!("{} RMSE grows {growth:.2}x, faster than P", m.key()));
        }
        bounded.push(format!("{} RMSE {r:.3?}", m.key()));
    }
    let n_k = RANDOM_N_K.len() as f64;
    let jzs_bias = (0..RANDOM_N_K.len()).map(|i| over_beta(i, MetaMethod::Jzs, &bias, true)).sum::<f64>() / n_k;
    let d_bias = (0..RANDOM_N_K.len()).map(|i| over_beta(i, MetaMethod::GDetailed, &bias, true)).sum::<f64>() / n_k;
    if jzs_bias > 0.0 {
        failures.push(format!("JZS mean bias {jzs_bias:.4} > 0"));
    }
    if d_bias < 0.0 {
        failures.push(format!("D mean bias {d_bias:.4} < 0"));
    }
    let skipped: usize = results.iter().flatten().map(|r| r.spec.replicates - r.outcomes.len()).sum();
    Outcome::new(
        failures.is_empty(),
        format!(
            "P |bias| by K {p_bias:.3?}, RMSE {p_rmse:.3?}; {}; mean bias β>0 JZS {jzs_bias:.3}, D {d_bias:.3}; skipped {skipped}{}",
            bounded.join("; "),
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    )
}

fn determinism() -> Outcome {
    let specs = [
        random_spec(0.2, 5, 6),
        ScenarioSpec {
            model: Model::SimpleRegression,
            partition: Partition::Unequal(vec![0.05, 0.1, 0.15, 0.3, 0.4]),
            ..fixed_spec(0.1, 5, 6)
        },
    ];
    let render = |workers: usize| -> (String, String) {
        let results: Vec<ScenarioResult> = specs.iter().map(|s| run_scenario(s, Some(workers)).unwrap()).collect();
        let mut csv = Vec::new();
        write_metrics_csv(&results, &mut csv).unwrap();
        let bits: Vec<String> = results
            .iter()
            .flat_map(|r| r.outcomes.iter())
            .flat_map(|o| {
                let mut v = vec![o.full_g.two_log_bf.to_bits(), o.full_jzs.two_log_bf.to_bits()];
                v.extend(o.meta.iter().map(|b| b.two_log_bf.to_bits()));
                v
            })
            .map(|b| format!("{b:016x}"))
            .collect();
        (String::from_utf8(csv).unwrap(), bits.join(","))
    };
    let base = render(1);
    let same = [1, 2, 4].iter().all(|&w| render(w) == base);
    Outcome::new(same, "two scenarios × {1, 2, 4} workers: metrics CSV and outcome bits identical")
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("worked example per-study factors and weights", worked_example_columns),
        ("worked example meta-analytic factors", worked_example_meta),
        ("oracle equivalence of g-prior forms", oracle_equivalence),
        ("density contracts", density_contracts),
        ("product-of-factors negative control", product_fallacy),
        ("fixed-N simulation agreement", fixed_n_simulation),
        ("random-N bias and RMSE trends", random_n_trends),
        ("simulation determinism across worker counts", determinism),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (name, run) in criteria {
        let t = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {name} [{:.1}s]: {}",
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
