//! Plot-ready CSV exports of simulation results.

use std::io::Write;

use crate::error::Result;
use crate::io::format::sig6;
use crate::synthesis::MetaMethod;

use super::{ScenarioResult, MIN_PART_SIZE};

pub const RNG_NAME: &str = "ChaCha20 (rand_chacha), seeded from the scenario seed, stream = replicate index";

/// Values outside this range are drawn on the boundary in scatter plots.
pub const CLIP_RANGE: (f64, f64) = (-1.0, 12.0);

pub fn clip_for_plot(x: f64) -> f64 {
    x.clamp(CLIP_RANGE.0, CLIP_RANGE.1)
}

fn header(out: &mut dyn Write, results: &[ScenarioResult]) -> Result<()> {
    writeln!(out, "# tool: bfmeta {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(out, "# rng: {RNG_NAME}")?;
    let mut seeds: Vec<u64> = results.iter().map(|r| r.spec.seed).collect();
    seeds.dedup();
    let seeds: Vec<String> = seeds.iter().map(u64::to_string).collect();
    writeln!(out, "# seed: {}", seeds.join(" "))?;
    writeln!(out, "# scenarios sharing a seed reuse the same random streams")?;
    writeln!(
        out,
        "# partition: eq = N/K; uneq = largest remainder on w2*N; random = uniform composition with parts >= {MIN_PART_SIZE}"
    )?;
    writeln!(out, "# t_test design: alternating 0/1 allocation, studies are contiguous blocks balanced to within one")?;
    writeln!(out, "# regression design: x ~ N(0, 1/4) drawn afresh for each replicate")?;
    writeln!(out, "# reference: g-prior methods vs pooled g-prior BF with g = N; JZS vs pooled JZS BF")?;
    writeln!(out, "# kappa: quadratic weights on 4 evidence grades, BF01 orientation when beta = 0")?;
    Ok(())
}

/// One row per (scenario, method) with bias, RMSE and κ on the `2 ln BF10` scale.
pub fn write_metrics_csv<W: Write>(results: &[ScenarioResult], mut out: W) -> Result<()> {
    header(&mut out, results)?;
    writeln!(
        out,
        "scenario,model,partition,n,beta,k,replicates,method,used,failed,mean_full,mean_meta,bias,rmse,kappa,kappa_orientation"
    )?;
    for r in results {
        let s = &r.spec;
        for m in &r.summaries {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                s.name,
                s.model,
                s.partition.label(),
                s.n,
                s.beta,
                s.k,
                s.replicates,
                m.method.key(),
                m.replicates_used,
                m.failures,
                sig6(m.mean_full),
                sig6(m.mean_meta),
                sig6(m.bias),
                sig6(m.rmse),
                m.kappa.map_or_else(|| "NA".to_string(), sig6),
                m.kappa_orientation,
            )?;
        }
    }
    Ok(())
}

/// One row per (scenario, replicate, method) with raw and clipped values.
pub fn write_replicates_csv<W: Write>(results: &[ScenarioResult], mut out: W) -> Result<()> {
    header(&mut out, results)?;
    writeln!(out, "# clipped columns are limited to [{}, {}]", CLIP_RANGE.0, CLIP_RANGE.1)?;
    writeln!(
        out,
        "scenario,beta,k,replicate,n_total,method,full_two_log_bf10,meta_two_log_bf10,full_clipped,meta_clipped"
    )?;
    for r in results {
        for o in &r.outcomes {
            for m in MetaMethod::ALL {
                let full = o.reference_for(m).two_log_bf10();
                let meta = o.meta_for(m).two_log_bf10();
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.spec.name,
                    r.spec.beta,
                    r.spec.k,
                    o.replicate,
                    o.n_total,
                    m.key(),
                    sig6(full),
                    sig6(meta),
                    sig6(clip_for_plot(full)),
                    sig6(clip_for_plot(meta)),
                )?;
            }
        }
    }
    Ok(())
}
