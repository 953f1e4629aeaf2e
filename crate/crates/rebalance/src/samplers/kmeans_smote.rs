//! Cluster-filtered interpolation: k-means runs on the whole dataset, only
//! clusters that are not majority-dominated survive as seed regions, and
//! sparser surviving clusters receive more synthetic rows.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::mlprims::{kmeans_assign, kmeans_fit};
use crate::neighbors::{euclidean, NeighborModel};
use crate::samplers::{common, Provenance, SamplerConfig, SamplerId, SyntheticBatch};

struct Region {
    /// Dataset positions of the cluster's minority members.
    members: Vec<usize>,
    /// Smallest member row id; keys random streams and quota tie-breaks.
    anchor: u64,
    /// Sparsity weight: mean pairwise distance to the density exponent,
    /// per member.
    weight: f64,
}

pub(crate) fn oversample(
    ds: &Dataset,
    label: u32,
    n_to_add: usize,
    cfg: &SamplerConfig,
) -> Result<SyntheticBatch> {
    let tag = SamplerId::KMeansSmote.tag();
    let model =
        kmeans_fit(ds, cfg.cluster_k.min(ds.n_rows()), common::clustering_seed(cfg, tag, label))?;
    let assignment = kmeans_assign(&model, ds)?;

    let mut minority_members: Vec<Vec<usize>> = vec![Vec::new(); model.k()];
    let mut sizes: Vec<usize> = vec![0; model.k()];
    for (pos, &c) in assignment.iter().enumerate() {
        sizes[c] += 1;
        if ds.labels()[pos] == label {
            minority_members[c].push(pos);
        }
    }

    let exponent = cfg.density_exponent.unwrap_or(ds.n_cols() as f64);
    let mut regions: Vec<Region> = Vec::new();
    for (members, &size) in minority_members.into_iter().zip(&sizes) {
        if members.is_empty() {
            continue;
        }
        let majority = size - members.len();
        let ratio = (majority as f64 + 1.0) / (members.len() as f64 + 1.0);
        if ratio >= cfg.imbalance_ratio_threshold {
            continue;
        }
        let weight = if members.len() < 2 {
            0.0
        } else {
            let mut sum = 0.0;
            let mut pairs = 0usize;
            for i in 0..members.len() {
                for j in i + 1..members.len() {
                    sum += euclidean(ds.row(members[i]), ds.row(members[j]));
                    pairs += 1;
                }
            }
            (sum / pairs as f64).powf(exponent) / members.len() as f64
        };
        let anchor = members.iter().map(|&p| ds.row_ids()[p]).min().expect("nonempty");
        regions.push(Region { members, anchor, weight });
    }
    if regions.is_empty() {
        return Err(Error::EmptySeedSet { sampler: SamplerId::KMeansSmote.name() });
    }

    let weights: Vec<f64> = regions.iter().map(|r| r.weight).collect();
    let anchors: Vec<u64> = regions.iter().map(|r| r.anchor).collect();
    let quotas = common::allocate_quotas(&weights, n_to_add, &anchors);

    // Per-region neighbor tails among the region's own minority members,
    // as dataset positions.
    let sub_index = common::id_index(ds);
    let mut tails: Vec<Vec<Vec<usize>>> = Vec::with_capacity(regions.len());
    for region in &regions {
        if region.members.len() < 2 {
            tails.push(vec![Vec::new(); region.members.len()]);
            continue;
        }
        let sub = ds.take_rows(&region.members);
        let sub_model = NeighborModel::fit_default(&sub)?;
        let lists = sub_model.knn_query(&sub, cfg.k);
        tails.push(
            lists
                .iter()
                .map(|l| l.genuine(cfg.k).iter().map(|n| sub_index[&n.row_id]).collect())
                .collect(),
        );
    }

    Ok(common::run_quota_tasks(&quotas, ds.n_cols(), label, |slot, ordinal| {
        let region = &regions[slot];
        let mut pick = common::scoped_pick_stream(cfg, tag, label, region.anchor, ordinal);
        let member = pick.below(region.members.len());
        let base = region.members[member];
        let base_id = ds.row_ids()[base];
        let mut gen = common::gen_stream(cfg, tag, label, base_id, ordinal);
        let tail = &tails[slot][member];
        if tail.is_empty() {
            let provenance =
                Provenance { base_row_id: base_id, partner_row_id: None, method: "duplicate" };
            return (ds.row(base).to_vec(), provenance);
        }
        // Generation draws, in order: partner index, then gap.
        let partner = tail[gen.below(tail.len())];
        let gap = gen.next_f64();
        let row = common::interpolate(ds.row(base), ds.row(partner), gap);
        let provenance = Provenance {
            base_row_id: base_id,
            partner_row_id: Some(ds.row_ids()[partner]),
            method: "interpolate",
        };
        (row, provenance)
    }))
}
