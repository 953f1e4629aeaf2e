//! Border-focused interpolation: only minority rows whose mixed-class
//! neighborhood is at least half majority (but not fully majority, which
//! marks noise) seed new rows. Partners come from the minority-only
//! neighborhood of each seed.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::neighbors::NeighborModel;
use crate::samplers::{common, Provenance, SamplerConfig, SamplerId, SyntheticBatch};

/// Positions (within the minority subset) of rows on the class border:
/// at least half of the surrounding labels are foreign, but not all of them.
pub(crate) fn danger_positions(
    ds: &Dataset,
    minority: &Dataset,
    label: u32,
    k: usize,
) -> Result<Vec<usize>> {
    let full_index = common::id_index(ds);
    let model = NeighborModel::fit_default(ds)?;
    let lists = model.knn_query(minority, k);
    let mut danger = Vec::new();
    for (pos, list) in lists.iter().enumerate() {
        let tail = list.genuine(k);
        let majority =
            tail.iter().filter(|n| ds.labels()[full_index[&n.row_id]] != label).count();
        if (majority as f64) >= tail.len() as f64 / 2.0 && majority < tail.len() {
            danger.push(pos);
        }
    }
    Ok(danger)
}

pub(crate) fn oversample(
    ds: &Dataset,
    label: u32,
    n_to_add: usize,
    cfg: &SamplerConfig,
) -> Result<SyntheticBatch> {
    let minority = ds.filter_by_label(label, true);
    let danger = danger_positions(ds, &minority, label, cfg.k)?;
    if danger.is_empty() {
        return Err(Error::EmptySeedSet { sampler: SamplerId::BorderlineSmote.name() });
    }

    let minority_model = NeighborModel::fit_default(&minority)?;
    let danger_ds = minority.take_rows(&danger);
    let lists = minority_model.knn_query(&danger_ds, cfg.k);
    let index = common::id_index(&minority);
    let tag = SamplerId::BorderlineSmote.tag();

    let weights = vec![1.0; danger.len()];
    let quotas = common::allocate_quotas(&weights, n_to_add, danger_ds.row_ids());

    Ok(common::run_quota_tasks(&quotas, ds.n_cols(), label, |slot, ordinal| {
        let base_id = danger_ds.row_ids()[slot];
        // Draws, in order: partner index, then gap.
        let mut gen = common::gen_stream(cfg, tag, label, base_id, ordinal);
        let tail = lists[slot].genuine(cfg.k);
        let partner = &tail[gen.below(tail.len())];
        let gap = gen.next_f64();
        let row = common::interpolate(
            danger_ds.row(slot),
            minority.row(index[&partner.row_id]),
            gap,
        );
        let provenance = Provenance {
            base_row_id: base_id,
            partner_row_id: Some(partner.row_id),
            method: "interpolate",
        };
        (row, provenance)
    }))
}
