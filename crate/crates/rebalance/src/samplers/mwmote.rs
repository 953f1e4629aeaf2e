//! Majority-weighted interpolation. Minority rows whose whole neighborhood
//! is majority are set aside as noise; the remainder locate the majority
//! border, and the border in turn votes on which minority rows matter
//! most. Bases are drawn by those votes and interpolate toward a member of
//! their own minority cluster, which keeps new rows inside the structure
//! the votes singled out.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::mlprims::{kmeans_assign, kmeans_fit};
use crate::neighbors::{squared_euclidean, NeighborModel};
use crate::samplers::{common, Provenance, SamplerConfig, SamplerId, SyntheticBatch};

/// Closeness of a candidate row to a border row: the inverse of their
/// dimension-normalized squared distance, clipped at `mwmote_cf_th` and
/// rescaled so the clip lands on `mwmote_c_max`. Coincident rows divide by
/// zero, reach the clip through the infinity, and score the maximum.
fn closeness(border: &[f64], candidate: &[f64], n_cols: usize, cfg: &SamplerConfig) -> f64 {
    let dn = squared_euclidean(border, candidate) / n_cols as f64;
    (1.0 / dn).min(cfg.mwmote_cf_th) / cfg.mwmote_cf_th * cfg.mwmote_c_max
}

pub(crate) fn oversample(
    ds: &Dataset,
    label: u32,
    n_to_add: usize,
    cfg: &SamplerConfig,
) -> Result<SyntheticBatch> {
    let minority = ds.filter_by_label(label, true);
    let majority = ds.filter_by_label(label, false);
    let m = minority.n_rows();
    let tag = SamplerId::Mwmote.tag();
    if majority.n_rows() == 0 {
        return Err(Error::EmptySeedSet { sampler: SamplerId::Mwmote.name() });
    }

    // Noise filter: keep minority rows with at least one minority sibling
    // among their k1 nearest in the full dataset.
    let full_model = NeighborModel::fit_default(ds)?;
    let full_index = common::id_index(ds);
    let informative: Vec<usize> = (0..m)
        .into_par_iter()
        .filter(|&pos| {
            full_model
                .knn_of(minority.row(pos), minority.row_ids()[pos], cfg.k1)
                .genuine(cfg.k1)
                .iter()
                .any(|n| ds.labels()[full_index[&n.row_id]] == label)
        })
        .collect();
    if informative.is_empty() {
        return Err(Error::EmptySeedSet { sampler: SamplerId::Mwmote.name() });
    }

    // Border majority: the k2 nearest majority rows of each filtered
    // minority row, deduplicated.
    let majority_model = NeighborModel::fit_default(&majority)?;
    let border_ids: BTreeSet<u64> = informative
        .iter()
        .flat_map(|&pos| {
            majority_model
                .knn_of(minority.row(pos), minority.row_ids()[pos], cfg.k2)
                .genuine(cfg.k2)
                .iter()
                .map(|n| n.row_id)
                .collect::<Vec<_>>()
        })
        .collect();
    let majority_index = common::id_index(&majority);
    let border: Vec<usize> = border_ids.iter().map(|id| majority_index[id]).collect();

    // Voted minority: the k3 nearest minority rows of each border row,
    // deduplicated. These are the only rows that can seed synthetics.
    let minority_model = NeighborModel::fit_default(&minority)?;
    let voted_ids: BTreeSet<u64> = border
        .iter()
        .flat_map(|&pos| {
            minority_model
                .knn_of(majority.row(pos), majority.row_ids()[pos], cfg.k3)
                .genuine(cfg.k3)
                .iter()
                .map(|n| n.row_id)
                .collect::<Vec<_>>()
        })
        .collect();
    let minority_index = common::id_index(&minority);
    let voted: Vec<usize> = voted_ids.iter().map(|id| minority_index[id]).collect();

    // Selection weight of each voted row: closeness-squared to every border
    // row, each border row's contribution normalized by its total closeness
    // to the voted set.
    let closeness_rows: Vec<Vec<f64>> = border
        .par_iter()
        .map(|&b| {
            voted
                .iter()
                .map(|&v| closeness(majority.row(b), minority.row(v), ds.n_cols(), cfg))
                .collect()
        })
        .collect();
    let mut weights = vec![0.0f64; voted.len()];
    for row in &closeness_rows {
        let denom: f64 = row.iter().sum();
        for (w, &cf) in weights.iter_mut().zip(row) {
            *w += cf * cf / denom;
        }
    }

    // Partner pools: k-means groups over the full minority set.
    let k = cfg.mwmote_cluster_k.min(m);
    let km = kmeans_fit(&minority, k, common::clustering_seed(cfg, tag, label))?;
    let assignment = kmeans_assign(&km, &minority)?;
    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); km.k()];
    for (pos, &c) in assignment.iter().enumerate() {
        clusters[c].push(pos);
    }

    Ok(common::run_draw_tasks(n_to_add, ds.n_cols(), label, |ordinal| {
        let mut pick = common::pick_stream(cfg, tag, label, ordinal);
        let base = voted[pick.weighted(&weights)];
        let base_id = minority.row_ids()[base];
        let mut gen = common::gen_stream(cfg, tag, label, base_id, ordinal);
        // Draws, in order: partner index within the base's cluster, then
        // gap. The partner may be the base itself.
        let members = &clusters[assignment[base]];
        let partner = members[gen.below(members.len())];
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
