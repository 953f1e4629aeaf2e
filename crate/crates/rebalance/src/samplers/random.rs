//! Plain duplication: each synthetic row is a copy of a uniformly chosen
//! minority row.

use crate::dataset::Dataset;
use crate::error::Result;
use crate::samplers::{common, SamplerConfig, SamplerId, SyntheticBatch};

pub(crate) fn oversample(
    ds: &Dataset,
    label: u32,
    n_to_add: usize,
    cfg: &SamplerConfig,
) -> Result<SyntheticBatch> {
    let minority = ds.filter_by_label(label, true);
    Ok(common::duplicate_uniform(&minority, label, n_to_add, cfg, SamplerId::RandomOversample.tag()))
}
