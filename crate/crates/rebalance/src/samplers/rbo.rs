//! Potential-guided random walks. A class potential compares Gaussian
//! kernels of taxicab distances to majority and minority rows; zero marks
//! the class boundary. Each synthetic row starts on a minority row and
//! takes random steps, keeping only those that shrink the potential's
//! magnitude, so rows drift toward the boundary without crossing into
//! territory the kernels call majority.

use crate::dataset::Dataset;
use crate::error::Result;
use crate::samplers::{common, Provenance, SamplerConfig, SamplerId, SyntheticBatch};

/// Signed class potential at `point`: majority kernels add, minority
/// kernels subtract.
fn potential(ds: &Dataset, label: u32, gamma: f64, point: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..ds.n_rows() {
        let mut l1 = 0.0;
        for (a, b) in point.iter().zip(ds.row(i)) {
            l1 += (a - b).abs();
        }
        let kernel = (-(l1 / gamma) * (l1 / gamma)).exp();
        if ds.labels()[i] == label {
            total -= kernel;
        } else {
            total += kernel;
        }
    }
    total
}

pub(crate) fn oversample(
    ds: &Dataset,
    label: u32,
    n_to_add: usize,
    cfg: &SamplerConfig,
) -> Result<SyntheticBatch> {
    let minority = ds.filter_by_label(label, true);
    let m = minority.n_rows();
    let d = ds.n_cols();
    let tag = SamplerId::Rbo.tag();

    Ok(common::run_draw_tasks(n_to_add, d, label, |ordinal| {
        let mut pick = common::pick_stream(cfg, tag, label, ordinal);
        let base = pick.below(m);
        let base_id = minority.row_ids()[base];
        let mut gen = common::gen_stream(cfg, tag, label, base_id, ordinal);

        // Step budget: fixed when the stop probability saturates, else a
        // rounded Gaussian around `iterations * p` with matching spread,
        // floored at zero.
        let steps = if cfg.rbo_stop_probability >= 1.0 {
            cfg.rbo_iterations
        } else {
            let mean = cfg.rbo_iterations as f64 * cfg.rbo_stop_probability;
            (mean + gen.gaussian() * mean).round().max(0.0) as usize
        };

        let mut cur = minority.row(base).to_vec();
        let mut cur_score = potential(ds, label, cfg.rbo_gamma, &cur).abs();
        let mut cand = vec![0.0f64; d];
        for _ in 0..steps {
            // Draws, in order: one sign per column, then one magnitude per
            // column. Both are drawn even for steps that end up rejected.
            let signs: Vec<f64> = (0..d).map(|_| gen.sign()).collect();
            for c in 0..d {
                cand[c] = cur[c] + signs[c] * gen.next_f64() * cfg.rbo_step_size;
            }
            let cand_score = potential(ds, label, cfg.rbo_gamma, &cand).abs();
            if cand_score < cur_score {
                std::mem::swap(&mut cur, &mut cand);
                cur_score = cand_score;
            }
        }

        let provenance =
            Provenance { base_row_id: base_id, partner_row_id: None, method: "walk" };
        (cur, provenance)
    }))
}
