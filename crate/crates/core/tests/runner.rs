use smol_core::io::{read_archive, read_centroids, read_metrics, write_run_outputs, ARCHIVE_FILE, CENTROIDS_FILE, METRICS_FILE, RUN_META_FILE};
use smol_core::task::evaluate_all;
use smol_core::{
    evaluate_batch, run_experiment, CrawlerParams, Genome, RunConfig, ScaledArm, ScaledArmParams, ScheduleConfig,
    ScheduleKind, Task, TaskConfig,
};

fn small(kind: ScheduleKind) -> RunConfig {
    RunConfig {
        schedule: ScheduleConfig {
            kind,
            total_phases: 20,
            final_fixed_phases: 2,
            human_peak_phase: 6,
            ..ScheduleConfig::default()
        },
        k: 128,
        batch_size: 32,
        generations_per_phase: 3,
        cvt_samples: 12_800,
        seed: 5,
        ..RunConfig::default()
    }
}

#[test]
fn logged_alpha_follows_the_schedule() {
    let mut c = small(ScheduleKind::Smol);
    c.schedule.total_phases = 100;
    c.schedule.final_fixed_phases = 10;
    c.generations_per_phase = 1;
    let out = run_experiment(&c).unwrap();
    assert_eq!(out.alphas.len(), 100);
    assert_eq!(out.alphas[0], 1.5);
    assert_eq!(out.alphas[45], 1.25);
    assert_eq!(*out.alphas.last().unwrap(), 1.0);
    for r in &out.metrics[1..] {
        assert_eq!(r.alpha, out.alphas[r.phase]);
    }
    assert_eq!(out.metrics[0].alpha, 1.5);
}

#[test]
fn evaluation_budget_and_monotone_counters() {
    let c = small(ScheduleKind::SmolHuman);
    let out = run_experiment(&c).unwrap();
    assert_eq!(out.metrics.len(), 1 + 20 * 3);
    let last = out.metrics.last().unwrap();
    assert_eq!(last.evaluations, c.evaluation_budget());
    assert_eq!(last.evaluations, 32 * (1 + 20 * 3));
    assert!(out.metrics.windows(2).all(|w| w[1].evaluations > w[0].evaluations));
    assert!(last.reevaluations > 0);
    for w in out.metrics.windows(2) {
        if w[1].phase == w[0].phase {
            assert!(w[1].coverage >= w[0].coverage);
        }
    }
}

#[test]
fn constant_schedule_never_loses_coverage() {
    let out = run_experiment(&small(ScheduleKind::Constant { alpha: 1.0 })).unwrap();
    assert!(out.metrics.windows(2).all(|w| w[1].coverage >= w[0].coverage));
}

#[test]
fn runs_are_reproducible_across_worker_counts() {
    let mut a = small(ScheduleKind::RandomUniform { lo: 0.5, hi: 1.5 });
    a.schedule.extinction_sigma = 0.1;
    let mut b = a.clone();
    a.workers = 1;
    b.workers = 4;
    let (ra, rb) = (run_experiment(&a).unwrap(), run_experiment(&b).unwrap());
    assert_eq!(ra.metrics, rb.metrics);
    assert_eq!(ra.archive.iter().collect::<Vec<_>>(), rb.archive.iter().collect::<Vec<_>>());
    let mut c = a.clone();
    c.seed = 6;
    assert_ne!(run_experiment(&c).unwrap().metrics, ra.metrics);
}

#[test]
fn crawler_runs_end_to_end() {
    let mut c = small(ScheduleKind::Smol);
    c.task = TaskConfig::Crawler(CrawlerParams {
        episode_steps: 60,
        hidden: vec![4],
        ..CrawlerParams::default()
    });
    c.schedule.total_phases = 4;
    c.schedule.final_fixed_phases = 1;
    c.batch_size = 16;
    c.generations_per_phase = 2;
    let out = run_experiment(&c).unwrap();
    assert_eq!(out.metrics.last().unwrap().evaluations, 16 * 9);
    assert!(!out.archive.is_empty());
}

#[test]
fn batch_evaluation_preserves_order() {
    let arm = ScaledArm::new(ScaledArmParams::default()).unwrap();
    assert!(evaluate_batch(vec![], &arm, 1.0).is_empty());
    let genomes: Vec<Genome> = (0..50).map(|i| Genome::new(vec![i as f64 * 0.01; 8]).unwrap()).collect();
    let one = evaluate_batch(genomes[..1].to_vec(), &arm, 1.2);
    let (f, d) = arm.evaluate(&genomes[0], 1.2);
    assert_eq!(one[0].as_ref().unwrap().fitness, f);
    assert_eq!(&one[0].as_ref().unwrap().descriptor[..], &d[..]);
    let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let wide = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
    let a = serial.install(|| evaluate_all(&arm, genomes.clone(), 1.1));
    let b = wide.install(|| evaluate_all(&arm, genomes.clone(), 1.1));
    assert_eq!(a, b);
    for (s, g) in a.iter().zip(&genomes) {
        assert_eq!(&s.as_ref().unwrap().genome, g);
    }
}

#[test]
fn output_files_round_trip() {
    let c = small(ScheduleKind::Smol);
    let out = run_experiment(&c).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_run_outputs(dir.path(), &c, &out, &[("schedule".into(), "smol".into())]).unwrap();
    assert_eq!(read_metrics(&dir.path().join(METRICS_FILE)).unwrap(), out.metrics);
    assert_eq!(&read_centroids(&dir.path().join(CENTROIDS_FILE)).unwrap(), out.centroids.as_ref());
    let rows = read_archive(&dir.path().join(ARCHIVE_FILE)).unwrap();
    assert_eq!(rows.len(), out.archive.occupied());
    for (row, (cell, s)) in rows.iter().zip(out.archive.iter()) {
        assert_eq!(row.cell, cell);
        assert_eq!(row.fitness, s.fitness);
        assert_eq!(&row.descriptor[..], &s.descriptor[..]);
        assert_eq!(&row.genome[..], &s.genome[..]);
    }
    let meta = std::fs::read_to_string(dir.path().join(RUN_META_FILE)).unwrap();
    assert!(meta.contains("# override: schedule=smol"));
    let replay = RunConfig::parse_str(&meta).unwrap();
    assert_eq!(replay, c);
    assert_eq!(run_experiment(&replay).unwrap().metrics, out.metrics);
}
