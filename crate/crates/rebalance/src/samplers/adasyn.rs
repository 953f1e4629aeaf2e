//! Adaptive allocation: minority rows surrounded by more majority examples
//! receive proportionally more synthetic rows. Interpolation partners come
//! from the minority members of each base's mixed-class neighborhood; a base
//! with no minority neighbor replicates itself.

use crate::dataset::Dataset;
use crate::error::Result;
use crate::neighbors::NeighborModel;
use crate::samplers::{common, Provenance, SamplerConfig, SamplerId, SyntheticBatch};

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
    let tag = SamplerId::Adasyn.tag();

    // Minority-only neighbor positions per base, plus the majority share that
    // weights its quota.
    let mut weights = Vec::with_capacity(minority.n_rows());
    let mut partner_pools: Vec<Vec<usize>> = Vec::with_capacity(minority.n_rows());
    for list in &lists {
        let tail = list.genuine(cfg.k);
        let mut pool = Vec::new();
        let mut majority_count = 0usize;
        for n in tail {
            let pos = full_index[&n.row_id];
            if ds.labels()[pos] == label {
                pool.push(pos);
            } else {
                majority_count += 1;
            }
        }
        weights.push(majority_count as f64);
        partner_pools.push(pool);
    }
    let quotas = common::allocate_quotas(&weights, n_to_add, minority.row_ids());

    Ok(common::run_quota_tasks(&quotas, ds.n_cols(), label, |base, ordinal| {
        let base_id = minority.row_ids()[base];
        let mut gen = common::gen_stream(cfg, tag, label, base_id, ordinal);
        let pool = &partner_pools[base];
        if pool.is_empty() {
            // Isolated base: nothing of its own class nearby to blend with.
            let provenance =
                Provenance { base_row_id: base_id, partner_row_id: None, method: "duplicate" };
            return (minority.row(base).to_vec(), provenance);
        }
        // Draws, in order: partner index, then gap.
        let partner_pos = pool[gen.below(pool.len())];
        let gap = gen.next_f64();
        let row = common::interpolate(minority.row(base), ds.row(partner_pos), gap);
        let provenance = Provenance {
            base_row_id: base_id,
            partner_row_id: Some(ds.row_ids()[partner_pos]),
            method: "interpolate",
        };
        (row, provenance)
    }))
}
