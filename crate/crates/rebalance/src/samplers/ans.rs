//! Adaptive neighborhood interpolation. Each minority row measures the
//! distance to its nearest minority sibling and counts how many majority
//! rows intrude within that distance; a threshold scan over those counts
//! discards outcast rows, and the survivors interpolate within a shared
//! radius, weighted by how many fellow survivors each one reaches.

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::neighbors::{euclidean, NeighborModel};
use crate::samplers::{common, Provenance, SamplerConfig, SamplerId, SyntheticBatch};

pub(crate) fn oversample(
    ds: &Dataset,
    label: u32,
    n_to_add: usize,
    cfg: &SamplerConfig,
) -> Result<SyntheticBatch> {
    let minority = ds.filter_by_label(label, true);
    let majority = ds.filter_by_label(label, false);
    let m = minority.n_rows();
    let tag = SamplerId::Ans.tag();
    let cap = cfg.radius_neighbor_cap;

    // Distance to each row's nearest minority sibling.
    let minority_model = NeighborModel::fit_default(&minority)?;
    let closest: Vec<f64> = minority_model
        .knn_query(&minority, 1)
        .iter()
        .map(|l| l.genuine(1)[0].distance)
        .collect();

    // Majority intrusion count within that distance, per row.
    let out_border: Vec<usize> = if majority.n_rows() >= 2 {
        let majority_model = NeighborModel::fit_default(&majority)?;
        (0..m)
            .into_par_iter()
            .map(|pos| {
                majority_model
                    .radius_of(minority.row(pos), minority.row_ids()[pos], closest[pos], cap)
                    .neighbors
                    .len()
            })
            .collect()
    } else {
        (0..m)
            .map(|pos| {
                (0..majority.n_rows())
                    .filter(|&j| euclidean(minority.row(pos), majority.row(j)) <= closest[pos])
                    .count()
                    .min(cap)
            })
            .collect()
    };

    // Scan intrusion thresholds until the outcast population stabilizes.
    // The previous-count seed of -1 means the scan can only settle from the
    // second threshold onward; if it never settles, the bound itself is
    // used.
    let c_max = ((ds.n_rows() as f64 * cfg.c_max_ratio).floor() as usize).max(1);
    let mut chosen: Option<usize> = None;
    let mut previous: i64 = -1;
    for c in 1..=c_max {
        let outcasts = out_border.iter().filter(|&&b| b >= c).count() as i64;
        if outcasts == previous {
            chosen = Some(c);
            if out_border.iter().any(|&b| b < c) {
                break;
            }
        }
        previous = outcasts;
    }
    let threshold = chosen.unwrap_or(c_max);

    let used: Vec<usize> = (0..m).filter(|&pos| out_border[pos] < threshold).collect();
    if used.is_empty() {
        return Err(Error::EmptySeedSet { sampler: SamplerId::Ans.name() });
    }

    // Shared interpolation radius: the widest nearest-sibling gap among the
    // survivors.
    let radius = used.iter().map(|&p| closest[p]).fold(0.0f64, f64::max);

    let used_ds = minority.take_rows(&used);
    let index = common::id_index(&minority);
    let tails: Vec<Vec<usize>> = if used.len() >= 2 {
        let used_model = NeighborModel::fit_default(&used_ds)?;
        (0..used.len())
            .into_par_iter()
            .map(|i| {
                let list =
                    used_model.radius_of(used_ds.row(i), used_ds.row_ids()[i], radius, cap);
                let tail = list.genuine(list.neighbors.len());
                tail.iter().map(|n| index[&n.row_id]).collect()
            })
            .collect()
    } else {
        vec![Vec::new()]
    };

    let weights: Vec<f64> = tails.iter().map(|t| t.len() as f64).collect();
    let quotas = common::allocate_quotas(&weights, n_to_add, used_ds.row_ids());

    Ok(common::run_quota_tasks(&quotas, ds.n_cols(), label, |slot, ordinal| {
        let base = used[slot];
        let base_id = minority.row_ids()[base];
        let mut gen = common::gen_stream(cfg, tag, label, base_id, ordinal);
        let tail = &tails[slot];
        if tail.is_empty() {
            let provenance =
                Provenance { base_row_id: base_id, partner_row_id: None, method: "duplicate" };
            return (minority.row(base).to_vec(), provenance);
        }
        // Draws, in order: partner index, then gap.
        let partner = tail[gen.below(tail.len())];
        let gap = gen.next_f64();
        let row = common::interpolate(minority.row(base), minority.row(partner), gap);
        let provenance = Provenance {
            base_row_id: base_id,
            partner_row_id: Some(minority.row_ids()[partner]),
            method: "interpolate",
        };
        (row, provenance)
    }))
}
