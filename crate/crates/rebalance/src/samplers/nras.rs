//! Noise-filtered interpolation in a propensity-augmented space. A linear
//! model scores every row's likelihood of being minority; the rescaled score
//! becomes an extra feature, neighborhoods are formed in that augmented
//! space, and minority rows with too few minority neighbors there are
//! dropped as noise before SMOTE-style generation over the survivors.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::mlprims::fit_propensity;
use crate::neighbors::NeighborModel;
use crate::samplers::{common, Provenance, SamplerConfig, SamplerId, SyntheticBatch};

/// Minority scores rescaled to [0, 1] over the whole dataset; a flat score
/// column collapses to 0.5 everywhere.
fn rescaled_propensity(ds: &Dataset, label: u32) -> Vec<f64> {
    let model = fit_propensity(ds, label);
    let raw: Vec<f64> = (0..ds.n_rows()).map(|i| model.predict(ds.row(i))).collect();
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    if span > 1e-12 {
        raw.iter().map(|s| (s - lo) / span).collect()
    } else {
        vec![0.5; ds.n_rows()]
    }
}

/// The dataset with the propensity score appended as one more column.
fn augment(ds: &Dataset, scores: &[f64]) -> Dataset {
    let d = ds.n_cols();
    let mut features = Vec::with_capacity(ds.n_rows() * (d + 1));
    for i in 0..ds.n_rows() {
        features.extend_from_slice(ds.row(i));
        features.push(scores[i]);
    }
    Dataset::from_raw(
        features,
        d + 1,
        ds.labels().to_vec(),
        ds.row_ids().to_vec(),
        ds.n_classes(),
    )
}

pub(crate) fn oversample(
    ds: &Dataset,
    label: u32,
    n_to_add: usize,
    cfg: &SamplerConfig,
) -> Result<SyntheticBatch> {
    let scores = rescaled_propensity(ds, label);
    let augmented = augment(ds, &scores);
    let minority_positions: Vec<usize> =
        (0..ds.n_rows()).filter(|&p| ds.labels()[p] == label).collect();
    let aug_minority = augmented.take_rows(&minority_positions);

    let full_index = common::id_index(ds);
    let model = NeighborModel::fit_default(&augmented)?;
    let lists = model.knn_query(&aug_minority, cfg.k);

    // Keep minority rows with enough same-class support in augmented space.
    let kept: Vec<usize> = lists
        .iter()
        .enumerate()
        .filter(|(_, list)| {
            list.genuine(cfg.k)
                .iter()
                .filter(|n| ds.labels()[full_index[&n.row_id]] == label)
                .count()
                >= cfg.nras_threshold
        })
        .map(|(i, _)| minority_positions[i])
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptySeedSet { sampler: SamplerId::Nras.name() });
    }

    let tag = SamplerId::Nras.tag();
    let weights = vec![1.0; kept.len()];
    let kept_ids: Vec<u64> = kept.iter().map(|&p| ds.row_ids()[p]).collect();
    let quotas = common::allocate_quotas(&weights, n_to_add, &kept_ids);

    // Partner lookup among the kept rows only, still in augmented space.
    // Interpolation then runs over the original columns; the appended score
    // column is simply not emitted.
    let tails: Vec<Vec<usize>> = if kept.len() < 2 {
        vec![Vec::new()]
    } else {
        let kept_aug = augmented.take_rows(&kept);
        let kept_model = NeighborModel::fit_default(&kept_aug)?;
        kept_model
            .knn_query(&kept_aug, cfg.k)
            .iter()
            .map(|l| l.genuine(cfg.k).iter().map(|n| full_index[&n.row_id]).collect())
            .collect()
    };

    Ok(common::run_quota_tasks(&quotas, ds.n_cols(), label, |slot, ordinal| {
        let base = kept[slot];
        let base_id = ds.row_ids()[base];
        let mut gen = common::gen_stream(cfg, tag, label, base_id, ordinal);
        let tail = &tails[slot];
        if tail.is_empty() {
            let provenance =
                Provenance { base_row_id: base_id, partner_row_id: None, method: "duplicate" };
            return (ds.row(base).to_vec(), provenance);
        }
        // Draws, in order: partner index, then gap.
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
