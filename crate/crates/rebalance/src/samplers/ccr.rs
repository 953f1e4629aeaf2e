//! Cleaning plus synthesis. Every minority row grows a sphere by spending an
//! energy budget (crowded surroundings make growth expensive), majority rows
//! caught strictly inside a sphere are pushed out to its boundary, and each
//! row's quota of synthetic rows, inversely proportional to its sphere
//! radius, is scattered uniformly inside the sphere's bounding box.

use std::collections::HashMap;

use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::Result;
use crate::neighbors::euclidean;
use crate::rng::{stream_key, RandomStream};
use crate::samplers::{common, Provenance, SamplerConfig, SamplerId, SyntheticBatch};

/// One majority row pushed out of a minority sphere.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Relocation {
    /// The majority row that moved.
    pub row_id: u64,
    /// Its final coordinates.
    pub position: Vec<f64>,
    /// The minority row whose sphere pushed it last.
    pub base_row_id: u64,
    /// That sphere's radius.
    pub radius: f64,
}

/// Dataset edits produced by the cleaning stage, kept separate from the
/// synthetic batch so callers decide whether to apply them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CleaningPlan {
    /// Final positions of every majority row that moved, one entry per row.
    pub relocations: Vec<Relocation>,
    /// Sphere radius per minority row id.
    pub radii: Vec<(u64, f64)>,
}

/// Caps both the radius-growth loop and the relocation rounds. Growth
/// normally exhausts its budget in a handful of steps and relocation
/// reaches a clean state in one or two rounds; the cap only guards
/// pathological geometry.
const MAX_ROUNDS: usize = 64;

/// Relative margin for the strictly-inside test, so a row sitting exactly on
/// a sphere boundary (for instance one just pushed there) is not inside.
fn strictly_inside(distance: f64, radius: f64) -> bool {
    distance < radius - 1e-12 * (1.0 + radius)
}

/// Grows a sphere outward from one minority row. `sorted` holds distances to
/// every majority row, ascending. Growth costs the current occupant count
/// plus one per unit radius; occupants beyond `cap` are not charged. The
/// budget is spent when the loop ends.
fn find_radius(sorted: &[f64], energy: f64, cap: usize) -> f64 {
    let mut radius = 0.0f64;
    let mut remaining = energy;
    for _ in 0..MAX_ROUNDS {
        if remaining <= 0.0 {
            break;
        }
        let inside = sorted.partition_point(|&d| d <= radius);
        let price = (inside.min(cap) + 1) as f64;
        let delta = remaining / price;
        if inside < sorted.len() && inside < cap && radius + delta >= sorted[inside] {
            // The step would swallow the next occupant: advance exactly to
            // it and charge the step at the new, higher price.
            let jump = sorted[inside] - radius;
            radius = sorted[inside];
            let inside_after = sorted.partition_point(|&d| d <= radius);
            remaining -= jump * (inside_after.min(cap) + 1) as f64;
            continue;
        }
        radius += delta;
        break;
    }
    radius
}

pub(crate) fn clean_and_oversample(
    ds: &Dataset,
    label: u32,
    n_to_add: usize,
    cfg: &SamplerConfig,
) -> Result<(CleaningPlan, SyntheticBatch)> {
    let minority = ds.filter_by_label(label, true);
    let majority_positions: Vec<usize> =
        (0..ds.n_rows()).filter(|&p| ds.labels()[p] != label).collect();
    let tag = SamplerId::Ccr.tag();

    // Sphere radii from the original geometry.
    let mut radii = Vec::with_capacity(minority.n_rows());
    for pos in 0..minority.n_rows() {
        let mut dists: Vec<f64> = majority_positions
            .iter()
            .map(|&p| euclidean(minority.row(pos), ds.row(p)))
            .collect();
        dists.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
        radii.push(find_radius(&dists, cfg.energy, cfg.radius_neighbor_cap));
    }

    // Push majority rows out, repeating until no row is strictly inside any
    // sphere. Each row's move depends only on its own position, so rows are
    // independent within a round.
    let mut current: Vec<Vec<f64>> =
        majority_positions.iter().map(|&p| ds.row(p).to_vec()).collect();
    let mut moved: HashMap<usize, (u64, f64)> = HashMap::new();
    let mut clean = false;
    for round in 0..MAX_ROUNDS {
        let mut changed = false;
        for (slot, &maj_pos) in majority_positions.iter().enumerate() {
            let containers: Vec<usize> = (0..minority.n_rows())
                .filter(|&b| strictly_inside(euclidean(&current[slot], minority.row(b)), radii[b]))
                .collect();
            if containers.is_empty() {
                continue;
            }
            let maj_id = ds.row_ids()[maj_pos];
            let mut stream = RandomStream::new(
                cfg.seed,
                stream_key(&[common::TAG_CLEAN, tag, label as u64, round as u64, maj_id]),
            );
            let base = containers[stream.below(containers.len())];
            let base_row = minority.row(base);
            let d = euclidean(&current[slot], base_row);
            // Push direction: outward from the chosen base through the row,
            // or random when the two coincide.
            let unit: Vec<f64> = if d > 0.0 {
                current[slot].iter().zip(base_row).map(|(x, b)| (x - b) / d).collect()
            } else {
                loop {
                    let dir: Vec<f64> = (0..ds.n_cols()).map(|_| stream.gaussian()).collect();
                    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if norm > 1e-12 {
                        break dir.into_iter().map(|v| v / norm).collect();
                    }
                }
            };
            // Walk along the ray until the point leaves every sphere, not
            // just the chosen one. A sphere's interior meets a ray in one
            // interval, so each sphere binds at most once and the walk ends
            // on the boundary of whichever sphere bound last.
            let mut t_star = radii[base];
            let mut landing = base;
            for _ in 0..minority.n_rows() {
                let candidate: Vec<f64> =
                    base_row.iter().zip(&unit).map(|(b, u)| b + t_star * u).collect();
                let mut next: Option<(f64, usize)> = None;
                for j in 0..minority.n_rows() {
                    let center = minority.row(j);
                    if !strictly_inside(euclidean(&candidate, center), radii[j]) {
                        continue;
                    }
                    let beta: f64 = unit
                        .iter()
                        .zip(base_row.iter().zip(center))
                        .map(|(u, (b, c))| u * (b - c))
                        .sum();
                    let gamma: f64 = base_row
                        .iter()
                        .zip(center)
                        .map(|(b, c)| (b - c) * (b - c))
                        .sum::<f64>()
                        - radii[j] * radii[j];
                    let exit = -beta + (beta * beta - gamma).max(0.0).sqrt();
                    if exit > t_star && next.is_none_or(|(best, _)| exit > best) {
                        next = Some((exit, j));
                    }
                }
                match next {
                    Some((exit, j)) => {
                        t_star = exit;
                        landing = j;
                    }
                    None => break,
                }
            }
            let raw: Vec<f64> =
                base_row.iter().zip(&unit).map(|(b, u)| b + t_star * u).collect();
            let landing_row = minority.row(landing);
            let d_land = euclidean(&raw, landing_row);
            // Snap exactly onto the landing boundary; the walk already put
            // the point there up to quadratic-root rounding.
            let position: Vec<f64> = if d_land > 0.0 {
                raw.iter()
                    .zip(landing_row)
                    .map(|(x, c)| c + (x - c) * (radii[landing] / d_land))
                    .collect()
            } else {
                raw
            };
            current[slot] = position;
            moved.insert(slot, (minority.row_ids()[landing], radii[landing]));
            changed = true;
        }
        if !changed {
            clean = true;
            break;
        }
    }
    if !clean {
        log::warn!("ccr relocation did not settle within {MAX_ROUNDS} rounds for class {label}");
    }

    let mut slots: Vec<usize> = moved.keys().copied().collect();
    slots.sort_unstable();
    let relocations: Vec<Relocation> = slots
        .into_iter()
        .map(|slot| {
            let (base_row_id, radius) = moved[&slot];
            Relocation {
                row_id: ds.row_ids()[majority_positions[slot]],
                position: current[slot].clone(),
                base_row_id,
                radius,
            }
        })
        .collect();
    let plan = CleaningPlan {
        relocations,
        radii: minority.row_ids().iter().copied().zip(radii.iter().copied()).collect(),
    };

    // Tighter spheres seed more rows.
    let weights: Vec<f64> = radii.iter().map(|r| 1.0 / r).collect();
    let quotas = common::allocate_quotas(&weights, n_to_add, minority.row_ids());
    let batch = common::run_quota_tasks(&quotas, ds.n_cols(), label, |slot, ordinal| {
        let base_id = minority.row_ids()[slot];
        let mut gen = common::gen_stream(cfg, tag, label, base_id, ordinal);
        let radius = radii[slot];
        // Per coordinate, in order: sign, then magnitude.
        let row: Vec<f64> = minority
            .row(slot)
            .iter()
            .map(|b| {
                let sign = gen.sign();
                let magnitude = gen.next_f64() * radius;
                b + sign * magnitude
            })
            .collect();
        let provenance =
            Provenance { base_row_id: base_id, partner_row_id: None, method: "box" };
        (row, provenance)
    });
    Ok((plan, batch))
}
