//! Interpolation confined to k-means clusters of the minority class: the
//! seed row and its partner always come from the same cluster, so synthetic
//! rows never bridge separate minority regions.

use crate::dataset::Dataset;
use crate::error::Result;
use crate::mlprims::{kmeans_assign, kmeans_fit};
use crate::neighbors::NeighborModel;
use crate::samplers::{common, Provenance, SamplerConfig, SamplerId, SyntheticBatch};

pub(crate) fn oversample(
    ds: &Dataset,
    label: u32,
    n_to_add: usize,
    cfg: &SamplerConfig,
) -> Result<SyntheticBatch> {
    let minority = ds.filter_by_label(label, true);
    let m = minority.n_rows();
    let tag = SamplerId::ClusterSmote.tag();

    let model = kmeans_fit(&minority, cfg.cluster_k.min(m), common::clustering_seed(cfg, tag, label))?;
    let assignment = kmeans_assign(&model, &minority)?;
    let mut by_cluster: Vec<Vec<usize>> = vec![Vec::new(); model.k()];
    for (pos, &c) in assignment.iter().enumerate() {
        by_cluster[c].push(pos);
    }
    let groups: Vec<Vec<usize>> = by_cluster.into_iter().filter(|g| !g.is_empty()).collect();

    // Per-group neighbor tails, as minority positions. Singleton groups get
    // an empty tail and fall back to duplication.
    let index = common::id_index(&minority);
    let mut tails: Vec<Vec<Vec<usize>>> = Vec::with_capacity(groups.len());
    for group in &groups {
        if group.len() < 2 {
            tails.push(vec![Vec::new(); group.len()]);
            continue;
        }
        let sub = minority.take_rows(group);
        let sub_model = NeighborModel::fit_default(&sub)?;
        let lists = sub_model.knn_query(&sub, cfg.k);
        tails.push(
            lists
                .iter()
                .map(|l| l.genuine(cfg.k).iter().map(|n| index[&n.row_id]).collect())
                .collect(),
        );
    }

    Ok(common::run_draw_tasks(n_to_add, ds.n_cols(), label, |ordinal| {
        // Pick draws, in order: cluster, then member.
        let mut pick = common::pick_stream(cfg, tag, label, ordinal);
        let g = pick.below(groups.len());
        let slot = pick.below(groups[g].len());
        let base = groups[g][slot];
        let base_id = minority.row_ids()[base];
        let mut gen = common::gen_stream(cfg, tag, label, base_id, ordinal);
        let tail = &tails[g][slot];
        if tail.is_empty() {
            let provenance =
                Provenance { base_row_id: base_id, partner_row_id: None, method: "duplicate" };
            return (minority.row(base).to_vec(), provenance);
        }
        // Generation draws, in order: partner index, then gap.
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
