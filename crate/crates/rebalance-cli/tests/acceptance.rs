//! Acceptance gate for the workspace: ten numbered criteria covering exact
//! balancing, metric fixtures, neighbor-search equivalence, interpolation
//! geometry, determinism under parallelism, runtime ordering of the slow
//! samplers, Gaussian gap moments, cleaning-stage guarantees, the benchmark
//! pipeline end to end, and fold hygiene. Each criterion is one test so the
//! harness prints one pass/fail line per criterion.

use std::collections::{HashMap, HashSet};
use std::sync::{Mutex, MutexGuard};
use std::time::Instant;

use rebalance::harness::{run_experiment, stratified_folds, stratified_subset, ClassifierId, RunOptions};
use rebalance::metrics::{evaluate, ConfusionMatrix};
use rebalance::neighbors::{NeighborModel, Strategy};
use rebalance::samplers::{
    oversample, oversample_with_cleaning, transform, SamplerConfig, SamplerId,
};
use rebalance::{Dataset, RandomStream};

/// Criteria run one at a time: several measure wall-clock time or saturate
/// every core, and concurrent siblings would distort them.
static GATE: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    GATE.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

/// Isotropic Gaussian blob per class: `(count, center, spread)` with the
/// center replicated across all `d` coordinates.
fn blobs(seed: u64, d: usize, classes: &[(usize, f64, f64)]) -> Dataset {
    let mut stream = RandomStream::new(seed, 0xB10B);
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (label, &(count, center, spread)) in classes.iter().enumerate() {
        for _ in 0..count {
            for _ in 0..d {
                features.push(center + stream.gaussian() * spread);
            }
            labels.push(label as u32);
        }
    }
    Dataset::from_parts(features, d, labels).expect("generated data is finite")
}

fn assert_balanced(ds: &Dataset, context: &str) {
    let counts = ds.class_counts();
    let max = counts.iter().map(|c| c.count).max().expect("classes present");
    for c in &counts {
        assert_eq!(c.count, max, "{context}: class {} holds {} of {max}", c.label, c.count);
    }
}

/// The six balance instances: binary and 4-class, imbalance up to 50:1,
/// n up to 5000.
fn balance_instances() -> Vec<(String, Dataset)> {
    let specs: Vec<(u64, usize, Vec<(usize, f64, f64)>)> = vec![
        (11, 4, vec![(900, 0.0, 1.0), (90, 2.5, 0.8)]),
        (12, 6, vec![(1960, 0.0, 1.5), (40, 3.0, 0.7)]),
        (13, 2, vec![(400, 0.0, 1.0), (80, 1.5, 0.6)]),
        (14, 4, vec![(1400, 0.0, 1.2), (350, 2.0, 0.9), (175, -2.0, 0.7), (75, 4.0, 0.5)]),
        (15, 8, vec![(4000, 0.0, 1.5), (600, 2.5, 1.0), (300, -2.5, 0.8), (100, 5.0, 0.6)]),
        (16, 3, vec![(2850, 0.0, 1.0), (150, 1.8, 0.8)]),
    ];
    specs
        .into_iter()
        .enumerate()
        .map(|(i, (seed, d, classes))| (format!("instance {}", i + 1), blobs(seed, d, &classes)))
        .collect()
}

#[test]
fn criterion_01_every_scalable_sampler_balances_exactly() {
    let _guard = serial();
    let cfg = SamplerConfig::default();
    let slow = [SamplerId::Ans, SamplerId::Mwmote, SamplerId::Rbo];
    for (name, ds) in balance_instances() {
        for sampler in SamplerId::ALL.into_iter().filter(|s| !slow.contains(s)) {
            let balanced = transform(&ds, sampler, &cfg)
                .unwrap_or_else(|e| panic!("{} on {name}: {e}", sampler.name()));
            assert_balanced(&balanced, &format!("{} on {name}", sampler.name()));
        }
    }
}

#[test]
fn criterion_01_slow_samplers_balance_exactly() {
    let _guard = serial();
    let cfg = SamplerConfig::default();
    for (name, ds) in balance_instances() {
        for sampler in [SamplerId::Ans, SamplerId::Mwmote, SamplerId::Rbo] {
            let balanced = transform(&ds, sampler, &cfg)
                .unwrap_or_else(|e| panic!("{} on {name}: {e}", sampler.name()));
            assert_balanced(&balanced, &format!("{} on {name}", sampler.name()));
        }
    }
}

#[test]
fn criterion_02_metric_fixtures_match_hand_derived_values() {
    let _guard = serial();
    let mut cm = ConfusionMatrix::new(2);
    for (truth, predicted, times) in [(0, 0, 3), (0, 1, 1), (1, 0, 2), (1, 1, 4)] {
        for _ in 0..times {
            cm.add(truth, predicted);
        }
    }
    let report = evaluate(&cm, 1.0);
    let cases = [
        ("av_acc", report.av_acc, 0.70000),
        ("m_avg", report.m_avg, 0.70711),
        ("av_f", report.av_f, 0.69697),
        ("cba", report.cba, 0.63333),
    ];
    for (metric, got, want) in cases {
        assert!((got - want).abs() < 1e-5, "{metric}: got {got}, want {want}");
    }

    let mut perfect = ConfusionMatrix::new(2);
    for (truth, times) in [(0u32, 5), (1u32, 7)] {
        for _ in 0..times {
            perfect.add(truth, truth);
        }
    }
    let report = evaluate(&perfect, 1.0);
    assert_eq!(report.av_acc, 1.0);
    assert_eq!(report.m_avg, 1.0);
    assert_eq!(report.av_f, 1.0);
    assert_eq!(report.cba, 1.0);

    let mut silent = ConfusionMatrix::new(2);
    for (truth, predicted, times) in [(0, 0, 5), (1, 0, 3)] {
        for _ in 0..times {
            silent.add(truth, predicted);
        }
    }
    assert_eq!(evaluate(&silent, 1.0).m_avg, 0.0, "a zero-recall class nulls the geometric mean");
}

#[test]
fn criterion_03_metric_tree_matches_brute_force_on_200_instances() {
    let _guard = serial();
    let mut picker = RandomStream::new(0x3EE, 1);
    for instance in 0..200u64 {
        let n = 20 + picker.below(281);
        let d = 1 + picker.below(8);
        let k = 1 + picker.below(10);
        let mut gen = RandomStream::new(0x3EE, 2 + instance);
        let features: Vec<f64> = (0..n * d).map(|_| gen.uniform(-10.0, 10.0)).collect();
        // Duplicated coordinates force distance ties, exercising the
        // row-id tie-break.
        let features: Vec<f64> = features
            .iter()
            .map(|v| if gen.next_f64() < 0.2 { v.round() } else { *v })
            .collect();
        let ds = Dataset::from_parts(features, d, vec![0; n]).expect("valid");

        let brute = NeighborModel::fit(&ds, Strategy::BruteForce, 16).expect("brute fit");
        let tree = NeighborModel::fit(&ds, Strategy::MetricTree, 4).expect("tree fit");

        for row in 0..n {
            let id = ds.row_ids()[row];
            let a = brute.knn_of(ds.row(row), id, k);
            let b = tree.knn_of(ds.row(row), id, k);
            assert_eq!(a.neighbors.len(), b.neighbors.len(), "instance {instance} row {row}");
            for (x, y) in a.neighbors.iter().zip(&b.neighbors) {
                assert_eq!(x.row_id, y.row_id, "instance {instance} row {row}");
                assert_eq!(
                    x.distance.to_bits(),
                    y.distance.to_bits(),
                    "instance {instance} row {row}"
                );
            }
        }
        for q in 0..10 {
            let point: Vec<f64> = (0..d).map(|_| gen.uniform(-12.0, 12.0)).collect();
            let a = brute.knn_of(&point, u64::MAX, k);
            let b = tree.knn_of(&point, u64::MAX, k);
            let left: Vec<(u64, u64)> =
                a.neighbors.iter().map(|n| (n.row_id, n.distance.to_bits())).collect();
            let right: Vec<(u64, u64)> =
                b.neighbors.iter().map(|n| (n.row_id, n.distance.to_bits())).collect();
            assert_eq!(left, right, "instance {instance} external query {q}");
        }
    }
}

/// Projection of `synthetic` onto the segment from `base` to `partner`:
/// returns (parameter, residual distance to the segment's carrier line).
fn project_on_segment(base: &[f64], partner: &[f64], synthetic: &[f64]) -> (f64, f64) {
    let len_sq: f64 = base.iter().zip(partner).map(|(b, p)| (p - b) * (p - b)).sum();
    assert!(len_sq > 0.0, "degenerate segment");
    let dot: f64 = base
        .iter()
        .zip(partner)
        .zip(synthetic)
        .map(|((b, p), s)| (s - b) * (p - b))
        .sum();
    let t = dot / len_sq;
    let residual_sq: f64 = base
        .iter()
        .zip(partner)
        .zip(synthetic)
        .map(|((b, p), s)| {
            let on_line = b + t * (p - b);
            (s - on_line) * (s - on_line)
        })
        .sum();
    (t, residual_sq.max(0.0).sqrt())
}

fn minority_count_in_tail(
    ds: &Dataset,
    model: &NeighborModel,
    id_to_pos: &HashMap<u64, usize>,
    row_id: u64,
    k: usize,
    label: u32,
) -> usize {
    let pos = id_to_pos[&row_id];
    model
        .knn_of(ds.row(pos), row_id, k)
        .genuine(k)
        .iter()
        .filter(|n| ds.labels()[id_to_pos[&n.row_id]] == label)
        .count()
}

#[test]
fn criterion_04_synthetics_lie_on_their_provenance_segments() {
    let _guard = serial();
    let ds = blobs(0x6E0, 3, &[(240, 0.0, 1.0), (80, 1.5, 1.0)]);
    let id_to_pos: HashMap<u64, usize> =
        ds.row_ids().iter().enumerate().map(|(p, &id)| (id, p)).collect();
    let model = NeighborModel::fit_default(&ds).expect("fit");
    let samplers = [
        SamplerId::Smote,
        SamplerId::SmoteD,
        SamplerId::Adasyn,
        SamplerId::BorderlineSmote,
        SamplerId::SafeLevelSmote,
    ];
    for seed in 0..10u64 {
        let cfg = SamplerConfig { seed: 1000 + seed, ..SamplerConfig::default() };
        for sampler in samplers {
            let batch = oversample(&ds, 1, 160, &cfg, sampler)
                .unwrap_or_else(|e| panic!("{} seed {seed}: {e}", sampler.name()));
            assert_eq!(batch.len(), 160);
            for i in 0..batch.len() {
                let p = &batch.provenance[i];
                let base = ds.row(id_to_pos[&p.base_row_id]);
                if p.method == "duplicate" {
                    let same = batch.row(i).iter().zip(base).all(|(a, b)| a.to_bits() == b.to_bits());
                    assert!(same, "{} seed {seed} row {i}: duplicate differs", sampler.name());
                    continue;
                }
                assert_eq!(p.method, "interpolate", "{} seed {seed}", sampler.name());
                let partner_id = p.partner_row_id.expect("interpolation has a partner");
                let partner = ds.row(id_to_pos[&partner_id]);
                let (t, residual) = project_on_segment(base, partner, batch.row(i));
                assert!(
                    residual <= 1e-9,
                    "{} seed {seed} row {i}: residual {residual}",
                    sampler.name()
                );
                let (lo, hi) = if sampler == SamplerId::SafeLevelSmote {
                    // The gap interval depends on how safe each endpoint is:
                    // a fully unsafe partner duplicates the base, a safer
                    // base compresses the interval toward 0, a safer partner
                    // pushes it toward 1.
                    let sl_b =
                        minority_count_in_tail(&ds, &model, &id_to_pos, p.base_row_id, cfg.k, 1);
                    let sl_n =
                        minority_count_in_tail(&ds, &model, &id_to_pos, partner_id, cfg.k, 1);
                    assert!(sl_b > 0 || sl_n > 0, "fully unsafe pairs are discarded");
                    if sl_n == 0 {
                        (0.0, 0.0)
                    } else if sl_b == sl_n {
                        (0.0, 1.0)
                    } else if sl_b > sl_n {
                        (0.0, sl_n as f64 / sl_b as f64)
                    } else {
                        (1.0 - sl_b as f64 / sl_n as f64, 1.0)
                    }
                } else {
                    (0.0, 1.0)
                };
                assert!(
                    t >= lo - 1e-9 && t <= hi + 1e-9,
                    "{} seed {seed} row {i}: parameter {t} outside [{lo}, {hi}]",
                    sampler.name()
                );
            }
        }
    }
}

#[test]
fn criterion_05_thread_count_never_changes_the_batch() {
    let _guard = serial();
    let ds = blobs(0x7EA, 6, &[(1500, 0.0, 1.0), (500, 1.5, 1.0)]);
    let cfg = SamplerConfig { seed: 2024, ..SamplerConfig::default() };
    let max_threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(8);
    for sampler in SamplerId::ALL {
        let mut runs = Vec::new();
        for threads in [1usize, 4, max_threads] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .expect("local pool");
            let batch = pool
                .install(|| oversample(&ds, 1, 1000, &cfg, sampler))
                .unwrap_or_else(|e| panic!("{} at {threads} threads: {e}", sampler.name()));
            runs.push((threads, batch));
        }
        let (_, reference) = &runs[0];
        for (threads, batch) in &runs[1..] {
            assert_eq!(batch.len(), reference.len(), "{}", sampler.name());
            assert_eq!(batch.provenance, reference.provenance, "{} at {threads} threads", sampler.name());
            for i in 0..batch.len() {
                let same = batch
                    .row(i)
                    .iter()
                    .zip(reference.row(i))
                    .all(|(a, b)| a.to_bits() == b.to_bits());
                assert!(same, "{} at {threads} threads: row {i} differs", sampler.name());
            }
        }
    }
}

#[test]
fn criterion_06_slow_sampler_runtimes_keep_their_order() {
    let _guard = serial();
    // A 10-d two-class instance in the spirit of forest-cover data: the
    // majority spread over three terrain ridges, the minority split between
    // large tight stands of its own and five-row niches scattered through
    // the ridges, plus one isolated far-off pair whose wide sibling gap
    // dominates every shared-radius computation. An 8000-row stratified
    // subset is what each sampler must balance.
    let d = 10;
    let mut stream = RandomStream::new(0xC0F, 0xB10B);
    let mut features: Vec<f64> = Vec::new();
    let mut labels: Vec<u32> = Vec::new();
    let blob_at = |features: &mut Vec<f64>, labels: &mut Vec<u32>,
                       stream: &mut RandomStream,
                       count: usize,
                       center: &[f64],
                       spread: f64,
                       label: u32| {
        for _ in 0..count {
            for &c in center {
                features.push(c + stream.gaussian() * spread);
            }
            labels.push(label);
        }
    };
    for ridge in [-4.0, 0.0, 4.0] {
        blob_at(&mut features, &mut labels, &mut stream, 2500, &vec![ridge; d], 1.5, 0);
    }
    for cluster in 0..12 {
        let center = vec![14.0 + 2.5 * cluster as f64; d];
        blob_at(&mut features, &mut labels, &mut stream, 100, &center, 0.15, 1);
    }
    for ridge in [-4.0, 0.0, 4.0] {
        for _ in 0..25 {
            let center: Vec<f64> = (0..d).map(|_| ridge + stream.gaussian() * 1.2).collect();
            blob_at(&mut features, &mut labels, &mut stream, 5, &center, 0.1, 1);
        }
    }
    blob_at(&mut features, &mut labels, &mut stream, 1, &vec![-40.0; d], 0.0, 1);
    blob_at(&mut features, &mut labels, &mut stream, 1, &vec![-51.0; d], 0.0, 1);
    let ds = Dataset::from_parts(features, d, labels).expect("generated data is finite");
    let subset = stratified_subset(&ds, 8000, 99).expect("subset");
    let cfg = SamplerConfig::default();

    let ladder = [
        SamplerId::Smote,
        SamplerId::SafeLevelSmote,
        SamplerId::Ans,
        SamplerId::Mwmote,
        SamplerId::Rbo,
    ];
    // Warm caches and the allocator before measuring.
    transform(&subset, SamplerId::Smote, &cfg).expect("warmup");

    let mut seconds = Vec::new();
    for sampler in ladder {
        let mut times = Vec::new();
        for _ in 0..3 {
            let start = Instant::now();
            let balanced = transform(&subset, sampler, &cfg)
                .unwrap_or_else(|e| panic!("{}: {e}", sampler.name()));
            times.push(start.elapsed().as_secs_f64());
            assert_balanced(&balanced, sampler.name());
        }
        times.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite"));
        println!("{}: median {:.3} s of {:?}", sampler.name(), times[1], times);
        seconds.push(times[1]);
    }
    for w in seconds.windows(2) {
        assert!(w[0] < w[1], "ordering violated: {seconds:?}");
    }
    let ratio = seconds[4] / seconds[0];
    assert!(ratio >= 20.0, "slowest/fastest ratio {ratio:.1} below 20: {seconds:?}");
}

#[test]
fn criterion_07_gaussian_gap_moments_match_sigma() {
    let _guard = serial();
    let ds = blobs(0x6A5, 2, &[(140, 0.0, 1.0), (60, 2.0, 0.5)]);
    let id_to_pos: HashMap<u64, usize> =
        ds.row_ids().iter().enumerate().map(|(p, &id)| (id, p)).collect();
    let cfg = SamplerConfig::default();
    assert_eq!(cfg.sigma, 0.5);
    let batch = oversample(&ds, 1, 10_000, &cfg, SamplerId::GaussianSmote).expect("runs");
    assert_eq!(batch.len(), 10_000);

    let mut gaps = Vec::with_capacity(batch.len());
    for i in 0..batch.len() {
        let p = &batch.provenance[i];
        assert_eq!(p.method, "gaussian");
        let base = ds.row(id_to_pos[&p.base_row_id]);
        let partner = ds.row(id_to_pos[&p.partner_row_id.expect("partner")]);
        let (t, residual) = project_on_segment(base, partner, batch.row(i));
        assert!(residual <= 1e-9, "row {i}: residual {residual}");
        gaps.push(t);
    }
    let n = gaps.len() as f64;
    let mean = gaps.iter().sum::<f64>() / n;
    let var = gaps.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    println!("recovered gaps: mean {mean:.5}, std {std:.5}");
    assert!((-0.02..=0.02).contains(&mean), "mean {mean} out of range");
    assert!((0.475..=0.525).contains(&std), "std {std} out of range");
}

#[test]
fn criterion_08_cleaning_leaves_no_majority_inside_any_sphere() {
    let _guard = serial();
    for instance in 0..10u64 {
        let d = 2 + (instance as usize) % 4;
        let n_maj = 60 + 30 * instance as usize;
        let n_min = 12 + 4 * instance as usize;
        let ds = blobs(
            0xCC0 + instance,
            d,
            &[(n_maj, 0.0, 1.2), (n_min, 0.8, 1.0)],
        );
        let cfg = SamplerConfig {
            energy: [0.5, 1.0, 2.0][(instance % 3) as usize],
            seed: 7 + instance,
            ..SamplerConfig::default()
        };
        let (plan, _batch) =
            oversample_with_cleaning(&ds, 1, n_maj - n_min, &cfg, SamplerId::Ccr).expect("runs");
        let plan = plan.expect("cleaning plan is returned");

        let id_to_pos: HashMap<u64, usize> =
            ds.row_ids().iter().enumerate().map(|(p, &id)| (id, p)).collect();
        let mut final_majority: HashMap<u64, Vec<f64>> = (0..ds.n_rows())
            .filter(|&p| ds.labels()[p] != 1)
            .map(|p| (ds.row_ids()[p], ds.row(p).to_vec()))
            .collect();
        for relocation in &plan.relocations {
            assert!(final_majority.contains_key(&relocation.row_id), "relocated row is majority");
            final_majority.insert(relocation.row_id, relocation.position.clone());
        }

        let distance = |a: &[f64], b: &[f64]| -> f64 {
            a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
        };
        for &(base_id, radius) in &plan.radii {
            let center = ds.row(id_to_pos[&base_id]);
            for (maj_id, pos) in &final_majority {
                let dist = distance(pos, center);
                assert!(
                    dist >= radius - 1e-9 * (1.0 + radius),
                    "instance {instance}: majority {maj_id} strictly inside sphere {base_id}: {dist} < {radius}"
                );
            }
        }
        for relocation in &plan.relocations {
            let center = ds.row(id_to_pos[&relocation.base_row_id]);
            let dist = distance(&relocation.position, center);
            assert!(
                (dist - relocation.radius).abs() <= 1e-9 * (1.0 + relocation.radius),
                "instance {instance}: row {} sits at {dist}, not on boundary {}",
                relocation.row_id,
                relocation.radius
            );
        }
    }
}

#[test]
fn criterion_09_benchmark_pipeline_lifts_mavg_above_the_unsampled_row() {
    let _guard = serial();
    // Both classes share one 4-d Gaussian, 20:1. Class priors then rule the
    // unsampled fit, minority recall collapses to zero, and its geometric
    // mean with it; oversampling restores equal priors.
    let dir = tempfile::tempdir().expect("tempdir");
    let input = dir.path().join("skewed.csv");
    let mut body = String::from("f0,f1,f2,f3,label\n");
    let mut stream = RandomStream::new(0x909, 5);
    for _ in 0..4762 {
        let row: Vec<String> = (0..4).map(|_| format!("{:.6}", stream.gaussian())).collect();
        body.push_str(&format!("{},common\n", row.join(",")));
    }
    for _ in 0..238 {
        let row: Vec<String> = (0..4).map(|_| format!("{:.6}", stream.gaussian())).collect();
        body.push_str(&format!("{},rare\n", row.join(",")));
    }
    std::fs::write(&input, body).expect("write input");

    let out_dir = dir.path().join("bench");
    let output = std::process::Command::new(env!("CARGO_BIN_EXE_rebalance"))
        .args([
            "benchmark",
            "--in",
            input.to_str().unwrap(),
            "--samplers",
            "smote,random_oversample",
            "--classifiers",
            "gaussian_nb",
            "--folds",
            "5",
            "--seed",
            "1234",
            "--out-dir",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .expect("binary runs");
    assert!(
        output.status.success(),
        "benchmark failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );

    let table =
        std::fs::read_to_string(out_dir.join("benchmark_gaussian_nb.csv")).expect("table exists");
    let mut lines = table.lines();
    assert_eq!(
        lines.next().unwrap(),
        "Sampling Method,AvAvg,AvFb,MAvG,CBA,Sampling Time (s),Classifier Time (s),Total Time (s)"
    );
    let mut mavg: HashMap<String, f64> = HashMap::new();
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        mavg.insert(cells[0].to_string(), cells[3].parse().expect("numeric MAvG"));
    }
    let none = mavg["None"];
    let smote = mavg["smote"];
    let random = mavg["random_oversample"];
    println!("MAvG: None {none}, smote {smote}, random_oversample {random}");
    assert_eq!(none, 0.0, "the unsampled classifier must never predict the rare class");
    assert!(smote > none, "smote MAvG {smote} does not exceed {none}");
    assert!(random > none, "random_oversample MAvG {random} does not exceed {none}");
}

#[test]
fn criterion_10_folds_partition_stratify_and_never_leak() {
    let _guard = serial();
    let mut picker = RandomStream::new(0xF01D, 1);
    for instance in 0..50u64 {
        let n_classes = 2 + (instance as usize) % 3;
        let d = 1 + (instance as usize) % 5;
        let classes: Vec<(usize, f64, f64)> = (0..n_classes)
            .map(|c| (5 + picker.below(60), 3.0 * c as f64, 0.8))
            .collect();
        let ds = blobs(0xF100 + instance, d, &classes);
        let plan = stratified_folds(&ds, 5, instance).expect("plan");

        // Partition: every row id lands in exactly one test fold.
        let mut seen: HashSet<u64> = HashSet::new();
        for fold in &plan.folds {
            for &id in &fold.test {
                assert!(seen.insert(id), "instance {instance}: row {id} in two test folds");
            }
        }
        assert_eq!(seen.len(), ds.n_rows(), "instance {instance}: test folds miss rows");

        // Complement: train is everything not held out, and stratification
        // puts floor or ceil of count/5 of each class in every fold.
        let id_to_pos: HashMap<u64, usize> =
            ds.row_ids().iter().enumerate().map(|(p, &id)| (id, p)).collect();
        for fold in &plan.folds {
            assert_eq!(fold.train.len() + fold.test.len(), ds.n_rows());
            let held: HashSet<u64> = fold.test.iter().copied().collect();
            for id in &fold.train {
                assert!(!held.contains(id), "instance {instance}: row {id} on both sides");
            }
            for (label, _, _) in classes.iter().enumerate().map(|(l, c)| (l as u32, c.0, c.1)) {
                let total = ds.labels().iter().filter(|&&l| l == label).count();
                let in_fold = fold
                    .test
                    .iter()
                    .filter(|id| ds.labels()[id_to_pos[id]] == label)
                    .count();
                assert!(
                    in_fold == total / 5 || in_fold == total.div_ceil(5),
                    "instance {instance}: class {label} has {in_fold} of {total} in one fold"
                );
            }
        }

        // The harness itself asserts per record that no resampled train row
        // carries a held-out id; running it is the leak check.
        if instance % 5 == 0 {
            let records = run_experiment(
                &ds,
                Some(SamplerId::RandomOversample),
                ClassifierId::NearestCentroid,
                &SamplerConfig { seed: instance, ..SamplerConfig::default() },
                &RunOptions::default(),
            )
            .expect("experiment runs");
            assert_eq!(records.len(), 5);
        }
    }
}
