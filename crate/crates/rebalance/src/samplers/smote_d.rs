//! Deterministic interpolation: no random draws at all. Each minority row's
//! share of the output is proportional to the spread (population standard
//! deviation) of its neighbor distances, each neighbor's share of that is
//! proportional to its distance, and rows are placed at evenly spaced
//! fractions along each base-neighbor segment.

use crate::dataset::Dataset;
use crate::error::Result;
use crate::neighbors::NeighborModel;
use crate::samplers::{common, Provenance, SamplerConfig, SyntheticBatch};

pub(crate) fn oversample(
    ds: &Dataset,
    label: u32,
    n_to_add: usize,
    cfg: &SamplerConfig,
) -> Result<SyntheticBatch> {
    let minority = ds.filter_by_label(label, true);
    let model = NeighborModel::fit_default(&minority)?;
    let lists = model.knn_query(&minority, cfg.k);
    let index = common::id_index(&minority);
    let m = minority.n_rows();

    let mut spreads = Vec::with_capacity(m);
    for list in &lists {
        let tail = list.genuine(cfg.k);
        let mean = tail.iter().map(|n| n.distance).sum::<f64>() / tail.len() as f64;
        let var =
            tail.iter().map(|n| (n.distance - mean).powi(2)).sum::<f64>() / tail.len() as f64;
        spreads.push(var.sqrt());
    }
    let base_quotas = common::allocate_quotas(&spreads, n_to_add, minority.row_ids());

    // Fully deterministic, so rows are built serially in
    // (base, neighbor rank, fraction) order.
    let mut features = Vec::with_capacity(n_to_add * ds.n_cols());
    let mut provenance = Vec::with_capacity(n_to_add);
    for (base, &quota) in base_quotas.iter().enumerate() {
        if quota == 0 {
            continue;
        }
        let base_id = minority.row_ids()[base];
        let tail = lists[base].genuine(cfg.k);
        let distances: Vec<f64> = tail.iter().map(|n| n.distance).collect();
        let neighbor_ids: Vec<u64> = tail.iter().map(|n| n.row_id).collect();
        let shares = common::allocate_quotas(&distances, quota, &neighbor_ids);
        for (j, &count) in shares.iter().enumerate() {
            let partner = minority.row(index[&neighbor_ids[j]]);
            for step in 0..count {
                let fraction = (step + 1) as f64 / count as f64;
                let row = common::interpolate(minority.row(base), partner, fraction);
                features.extend_from_slice(&row);
                provenance.push(Provenance {
                    base_row_id: base_id,
                    partner_row_id: Some(neighbor_ids[j]),
                    method: "interpolate",
                });
            }
        }
    }
    Ok(SyntheticBatch::new(features, ds.n_cols(), label, provenance))
}
