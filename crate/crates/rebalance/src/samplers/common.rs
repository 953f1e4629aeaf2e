//! Helpers shared by the sampler implementations: stream derivation, quota
//! allocation, interpolation, and batch assembly.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::rng::{stream_key, RandomStream};
use crate::samplers::{Provenance, SamplerConfig, SyntheticBatch};

/// Stream-key namespaces. The namespace is always the first part of a key so
/// streams drawn for different purposes can never collide.
pub(crate) const TAG_PICK: u64 = 1;
pub(crate) const TAG_GEN: u64 = 2;
pub(crate) const TAG_KMEANS: u64 = 3;
pub(crate) const TAG_CLEAN: u64 = 4;
pub(crate) const TAG_FILL: u64 = 5;

/// Stream that selects the seed row for ordinal `ordinal`.
pub(crate) fn pick_stream(
    cfg: &SamplerConfig,
    sampler_tag: u64,
    label: u32,
    ordinal: usize,
) -> RandomStream {
    RandomStream::new(
        cfg.seed,
        stream_key(&[TAG_PICK, sampler_tag, label as u64, ordinal as u64]),
    )
}

/// Seed-row selection stream scoped to a sub-population (a cluster, say)
/// identified by `scope`.
pub(crate) fn scoped_pick_stream(
    cfg: &SamplerConfig,
    sampler_tag: u64,
    label: u32,
    scope: u64,
    ordinal: usize,
) -> RandomStream {
    RandomStream::new(
        cfg.seed,
        stream_key(&[TAG_PICK, sampler_tag, label as u64, scope, ordinal as u64]),
    )
}

/// Stream that drives row generation once a seed row is fixed. Keyed by the
/// seed's row id plus the ordinal so repeated picks of one base stay
/// independent.
pub(crate) fn gen_stream(
    cfg: &SamplerConfig,
    sampler_tag: u64,
    label: u32,
    base_row_id: u64,
    ordinal: usize,
) -> RandomStream {
    RandomStream::new(
        cfg.seed,
        stream_key(&[TAG_GEN, sampler_tag, label as u64, base_row_id, ordinal as u64]),
    )
}

/// Stream for shortfall fills when a sampler could not place its full quota.
pub(crate) fn fill_stream(
    cfg: &SamplerConfig,
    sampler_tag: u64,
    label: u32,
    ordinal: usize,
) -> RandomStream {
    RandomStream::new(
        cfg.seed,
        stream_key(&[TAG_FILL, sampler_tag, label as u64, ordinal as u64]),
    )
}

/// Seed for a clustering pass inside a sampler, derived from the root seed.
pub(crate) fn clustering_seed(cfg: &SamplerConfig, sampler_tag: u64, label: u32) -> u64 {
    stream_key(&[cfg.seed, TAG_KMEANS, sampler_tag, label as u64])
}

/// Splits `total` rows across candidates proportionally to `weights` using
/// floor-plus-largest-remainder rounding. Fractional ties break toward the
/// smaller entry of `ties` (callers pass row ids). Degenerate weights (all
/// zero, or a non-finite sum) fall back to uniform.
pub(crate) fn allocate_quotas(weights: &[f64], total: usize, ties: &[u64]) -> Vec<usize> {
    debug_assert_eq!(weights.len(), ties.len());
    let n = weights.len();
    if n == 0 {
        return Vec::new();
    }
    let sum: f64 = weights.iter().sum();
    let uniform = vec![1.0; n];
    let weights = if sum.is_finite() && sum > 0.0 && weights.iter().all(|w| w.is_finite() && *w >= 0.0)
    {
        weights
    } else {
        &uniform[..]
    };
    let sum: f64 = weights.iter().sum();

    let mut quotas = Vec::with_capacity(n);
    let mut fractions = Vec::with_capacity(n);
    for &w in weights {
        let exact = w / sum * total as f64;
        let floor = exact.floor();
        quotas.push(floor as usize);
        fractions.push(exact - floor);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        fractions[b]
            .partial_cmp(&fractions[a])
            .expect("fractions are finite")
            .then_with(|| ties[a].cmp(&ties[b]))
    });
    let mut remaining = total.saturating_sub(quotas.iter().sum::<usize>());
    // One sweep suffices in exact arithmetic; the loop guards rounding drift.
    while remaining > 0 {
        for &i in &order {
            if remaining == 0 {
                break;
            }
            quotas[i] += 1;
            remaining -= 1;
        }
    }
    quotas
}

/// `base + gap * (partner - base)`, coordinate-wise.
pub(crate) fn interpolate(base: &[f64], partner: &[f64], gap: f64) -> Vec<f64> {
    base.iter().zip(partner).map(|(b, p)| b + gap * (p - b)).collect()
}

/// Maps each row id to its position within `ds`.
pub(crate) fn id_index(ds: &Dataset) -> HashMap<u64, usize> {
    ds.row_ids().iter().enumerate().map(|(pos, &id)| (id, pos)).collect()
}

/// Runs one generation task per synthetic row in parallel and assembles the
/// batch in task order. Tasks are `(weight-slot index, ordinal within slot)`
/// pairs expanded from `quotas`, so output order is (slot, ordinal) and does
/// not depend on the thread count.
pub(crate) fn run_quota_tasks<F>(
    quotas: &[usize],
    n_cols: usize,
    label: u32,
    generate: F,
) -> SyntheticBatch
where
    F: Fn(usize, usize) -> (Vec<f64>, Provenance) + Sync,
{
    let tasks: Vec<(usize, usize)> = quotas
        .iter()
        .enumerate()
        .flat_map(|(slot, &q)| (0..q).map(move |ordinal| (slot, ordinal)))
        .collect();
    let rows: Vec<(Vec<f64>, Provenance)> =
        tasks.into_par_iter().map(|(slot, ordinal)| generate(slot, ordinal)).collect();
    assemble(rows, n_cols, label)
}

/// Runs `n` generation tasks in parallel, one per global ordinal, and
/// assembles the batch in ordinal order.
pub(crate) fn run_draw_tasks<F>(n: usize, n_cols: usize, label: u32, generate: F) -> SyntheticBatch
where
    F: Fn(usize) -> (Vec<f64>, Provenance) + Sync,
{
    let rows: Vec<(Vec<f64>, Provenance)> =
        (0..n).into_par_iter().map(|ordinal| generate(ordinal)).collect();
    assemble(rows, n_cols, label)
}

fn assemble(rows: Vec<(Vec<f64>, Provenance)>, n_cols: usize, label: u32) -> SyntheticBatch {
    let mut features = Vec::with_capacity(rows.len() * n_cols);
    let mut provenance = Vec::with_capacity(rows.len());
    for (row, p) in rows {
        debug_assert_eq!(row.len(), n_cols);
        features.extend_from_slice(&row);
        provenance.push(p);
    }
    SyntheticBatch::new(features, n_cols, label, provenance)
}

/// Uniform random duplication of rows from `pool`. Serves both the
/// plain duplication sampler and the small-class fallback path.
pub(crate) fn duplicate_uniform(
    pool: &Dataset,
    label: u32,
    n_to_add: usize,
    cfg: &SamplerConfig,
    sampler_tag: u64,
) -> SyntheticBatch {
    let m = pool.n_rows();
    run_draw_tasks(n_to_add, pool.n_cols(), label, |ordinal| {
        let mut pick = pick_stream(cfg, sampler_tag, label, ordinal);
        let i = pick.below(m);
        let provenance = Provenance {
            base_row_id: pool.row_ids()[i],
            partner_row_id: None,
            method: "duplicate",
        };
        (pool.row(i).to_vec(), provenance)
    })
}
