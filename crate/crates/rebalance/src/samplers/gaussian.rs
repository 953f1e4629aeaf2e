//! Interpolation along the base-partner segment at a normally distributed
//! position: gap ~ N(0, sigma^2) instead of U[0, 1). The row can land before
//! the base or past the partner.

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
    let model = NeighborModel::fit_default(&minority)?;
    let lists = model.knn_query(&minority, cfg.k);
    let index = common::id_index(&minority);
    let m = minority.n_rows();
    let tag = SamplerId::GaussianSmote.tag();

    Ok(common::run_draw_tasks(n_to_add, ds.n_cols(), label, |ordinal| {
        let mut pick = common::pick_stream(cfg, tag, label, ordinal);
        let base = pick.below(m);
        let base_id = minority.row_ids()[base];
        // Generation draws, in order: partner index, then the normal gap
        // (two uniforms).
        let mut gen = common::gen_stream(cfg, tag, label, base_id, ordinal);
        let tail = lists[base].genuine(cfg.k);
        let partner = &tail[gen.below(tail.len())];
        let gap = gen.gaussian() * cfg.sigma;
        let row = common::interpolate(
            minority.row(base),
            minority.row(index[&partner.row_id]),
            gap,
        );
        let provenance = Provenance {
            base_row_id: base_id,
            partner_row_id: Some(partner.row_id),
            method: "gaussian",
        };
        (row, provenance)
    }))
}
