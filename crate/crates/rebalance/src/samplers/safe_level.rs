//! Interpolation biased toward the safer endpoint. Each row's safe level is
//! the number of minority examples among its neighbors; the gap interval is
//! chosen from the base/partner safe-level ratio so rows land nearer
//! whichever endpoint sits in friendlier territory. Attempts whose endpoints
//! are both fully unsafe produce nothing and are redrawn, within a bounded
//! surplus of attempts.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::Result;
use crate::neighbors::NeighborModel;
use crate::samplers::{common, Provenance, SamplerConfig, SamplerId, SyntheticBatch};

/// Gap interval for one (base, partner) pair, or `None` when the attempt
/// aborts. `sl_p` is the base's safe level, `sl_n` the partner's.
fn draw_gap(sl_p: usize, sl_n: usize, gen: &mut crate::rng::RandomStream) -> Option<f64> {
    if sl_n == 0 {
        // Partner unsafe. A safe base duplicates itself; two unsafe
        // endpoints yield nothing.
        return if sl_p == 0 { None } else { Some(0.0) };
    }
    let ratio = sl_p as f64 / sl_n as f64;
    let gap = if sl_p == sl_n {
        gen.uniform(0.0, 1.0)
    } else if sl_p > sl_n {
        // Safer base: stay close to it.
        gen.uniform(0.0, 1.0 / ratio)
    } else {
        // Safer partner: stay close to it. ratio 0 collapses the interval
        // to exactly 1, duplicating the partner.
        gen.uniform(1.0 - ratio, 1.0)
    };
    Some(gap)
}

pub(crate) fn oversample(
    ds: &Dataset,
    label: u32,
    n_to_add: usize,
    cfg: &SamplerConfig,
) -> Result<SyntheticBatch> {
    let minority = ds.filter_by_label(label, true);
    let full_index = common::id_index(ds);
    let model = NeighborModel::fit_default(ds)?;
    let lists = model.knn_query(&minority, cfg.k);
    let tag = SamplerId::SafeLevelSmote.tag();
    let m = minority.n_rows();

    // Safe level of every row that can appear in a pair: all minority rows,
    // plus any majority row reachable as a partner.
    let mut safe_level: HashMap<u64, usize> = HashMap::new();
    let mut foreign_positions: Vec<usize> = Vec::new();
    for (pos, list) in lists.iter().enumerate() {
        let tail = list.genuine(cfg.k);
        let count =
            tail.iter().filter(|n| ds.labels()[full_index[&n.row_id]] == label).count();
        safe_level.insert(minority.row_ids()[pos], count);
        for n in tail {
            let p = full_index[&n.row_id];
            if ds.labels()[p] != label {
                foreign_positions.push(p);
            }
        }
    }
    foreign_positions.sort_unstable();
    foreign_positions.dedup();
    if !foreign_positions.is_empty() {
        let foreign = ds.take_rows(&foreign_positions);
        for (i, list) in model.knn_query(&foreign, cfg.k).iter().enumerate() {
            let count = list
                .genuine(cfg.k)
                .iter()
                .filter(|n| ds.labels()[full_index[&n.row_id]] == label)
                .count();
            safe_level.insert(foreign.row_ids()[i], count);
        }
    }

    // A bounded surplus of attempts absorbs aborted pairs.
    let attempts =
        (n_to_add as f64 * (1.0 + cfg.safe_level_correction_rate)).ceil() as usize;
    let candidates: Vec<Option<(Vec<f64>, Provenance)>> = (0..attempts)
        .into_par_iter()
        .map(|attempt| {
            let mut pick = common::pick_stream(cfg, tag, label, attempt);
            let base = pick.below(m);
            let base_id = minority.row_ids()[base];
            // Draws, in order: partner index, then the branch gap.
            let mut gen = common::gen_stream(cfg, tag, label, base_id, attempt);
            let tail = lists[base].genuine(cfg.k);
            let partner = &tail[gen.below(tail.len())];
            let gap = draw_gap(safe_level[&base_id], safe_level[&partner.row_id], &mut gen)?;
            let row = common::interpolate(
                minority.row(base),
                ds.row(full_index[&partner.row_id]),
                gap,
            );
            let provenance = Provenance {
                base_row_id: base_id,
                partner_row_id: Some(partner.row_id),
                method: "interpolate",
            };
            Some((row, provenance))
        })
        .collect();

    let mut features = Vec::with_capacity(n_to_add * ds.n_cols());
    let mut provenance = Vec::with_capacity(n_to_add);
    for candidate in candidates.into_iter().flatten() {
        if provenance.len() == n_to_add {
            break;
        }
        features.extend_from_slice(&candidate.0);
        provenance.push(candidate.1);
    }

    let shortfall = n_to_add - provenance.len();
    if shortfall > 0 {
        // Not enough safe pairs in the attempt budget: duplicate safe bases,
        // or any base when nothing is safe.
        log::warn!(
            "safe_level_smote placed {} of {} rows for class {}; duplicating the rest",
            provenance.len(),
            n_to_add,
            label
        );
        let safe_positions: Vec<usize> = (0..m)
            .filter(|&pos| safe_level[&minority.row_ids()[pos]] > 0)
            .collect();
        let pool: Vec<usize> =
            if safe_positions.is_empty() { (0..m).collect() } else { safe_positions };
        for f in 0..shortfall {
            let mut fill = common::fill_stream(cfg, tag, label, f);
            let pos = pool[fill.below(pool.len())];
            features.extend_from_slice(minority.row(pos));
            provenance.push(Provenance {
                base_row_id: minority.row_ids()[pos],
                partner_row_id: None,
                method: "duplicate",
            });
        }
    }
    Ok(SyntheticBatch::new(features, ds.n_cols(), label, provenance))
}
