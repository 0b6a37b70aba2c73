use std::io::BufReader;
use std::process::Command;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use samplayer::baselines::{calibrate_interval, rw_sample_many, CalibrationSpec, RejAcceptance, WalkerKind};
use samplayer::config::{ExperimentConfig, OUT_DIR_ENV};
use samplayer::estimators::{PeripherySizeEstimate, ReachConfig, Reacher};
use samplayer::exact::decompose;
use samplayer::generators::{forest_fire, star, ForestFireParams};
use samplayer::layering::{generate_l0, L0Options, SecondHop};
use samplayer::stats::chi_square_uniform;
use samplayer::{
    load_edge_list, preprocess, AccessSession, CountingMode, Graph, QueryModel, SamplerHandle,
    SamplerParams,
};

fn exact_handle(g: &Graph, model: QueryModel, v0: usize, l0: usize, seed: u64) -> SamplerHandle {
    let mut session = AccessSession::new(g, model, CountingMode::Cached);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layering = generate_l0(&mut session, v0, l0, &L0Options::default(), &mut rng).unwrap();
    let exact = decompose(g, &layering, SecondHop::L2Only).unwrap();
    let estimate = PeripherySizeEstimate {
        l2plus_size: exact.periphery_size() as f64,
        d1_plus_avg: exact.d1_plus_avg(),
        d2_minus_avg: exact.d2_minus_avg(),
        s1_used: 0,
        s2_used: 0,
    };
    let rs0 = exact.min_node_rs(model).unwrap_or(1.0);
    SamplerHandle::from_parts(layering, estimate, rs0, 0.0, Reacher::new(ReachConfig::default()), seed).unwrap()
}

fn counts(nodes: &[usize], n: usize) -> Vec<u64> {
    let mut c = vec![0u64; n];
    for &v in nodes {
        c[v] += 1;
    }
    c
}

#[test]
fn sampler_with_exact_inputs_is_uniform_in_practice() {
    let cases = [
        (star(5).unwrap(), 1, 1),
        (Graph::from_edges(4, [(0, 1), (1, 2), (1, 3), (2, 3)]), 0, 1),
        (forest_fire(&ForestFireParams::new(120, 0.37, 0.3, 4)).unwrap(), 0, 12),
    ];
    for (g, v0, l0) in cases {
        for model in [QueryModel::Standard, QueryModel::DegreeRevealing] {
            let mut handle = exact_handle(&g, model, v0, l0, 17);
            let mut session = AccessSession::new(&g, model, CountingMode::Cached);
            let run = handle.sample_many(&mut session, 200 * g.node_count()).unwrap();
            let (_, p) = chi_square_uniform(&counts(&run.nodes(), g.node_count())).unwrap();
            assert!(p > 1e-4, "{model:?} on n={}: p = {p}", g.node_count());
        }
    }
}

#[test]
fn full_pipeline_stays_close_to_uniform_on_a_small_graph() {
    let g = forest_fire(&ForestFireParams::new(400, 0.37, 0.3, 8)).unwrap();
    let mut session = AccessSession::new(&g, QueryModel::Standard, CountingMode::Cached);
    let mut params = SamplerParams::new(40);
    params.s2 = 2000;
    let mut handle = preprocess(&mut session, 0, &params, 5).unwrap();
    let run = handle.sample_many(&mut session, 80_000).unwrap();
    let c = counts(&run.nodes(), g.node_count());
    let expected = 80_000.0 / g.node_count() as f64;
    let tv: f64 = c.iter().map(|&x| (x as f64 - expected).abs()).sum::<f64>() / (2.0 * 80_000.0);
    // sampling noise alone contributes about 0.056 at 200 draws per node
    assert!(tv < 0.12, "tv = {tv}");
}

#[test]
fn calibrated_rej_walk_is_uniform_on_forest_fire() {
    let g = forest_fire(&ForestFireParams::new(300, 0.37, 0.3, 2)).unwrap();
    let spec = CalibrationSpec::default_for(&g, vec![0], 3);
    let cal = calibrate_interval(&g, WalkerKind::Rej, &spec).unwrap();
    let mut session = AccessSession::new(&g, QueryModel::Standard, CountingMode::Cached);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let run = rw_sample_many(
        &mut session,
        WalkerKind::Rej,
        0,
        30_000,
        cal.interval,
        RejAcceptance::InverseDegree,
        &mut rng,
    )
    .unwrap();
    let (_, p) = chi_square_uniform(&counts(&run.samples, g.node_count())).unwrap();
    assert!(p > 1e-4, "interval {} p = {p}", cal.interval);
}

#[test]
fn edge_list_round_trip_preserves_structure() {
    let g = forest_fire(&ForestFireParams::new(500, 0.37, 0.3, 6)).unwrap();
    let mut text = b"# generated\n".to_vec();
    g.write_edge_list(&mut text).unwrap();
    let back = load_edge_list(BufReader::new(text.as_slice())).unwrap();
    assert_eq!(back.node_count(), g.node_count());
    assert_eq!(back.edge_count(), g.edge_count());
    let mut a: Vec<usize> = (0..g.node_count()).map(|v| g.degree(v)).collect();
    let mut b: Vec<usize> = (0..back.node_count()).map(|v| back.degree(v)).collect();
    a.sort_unstable();
    b.sort_unstable();
    assert_eq!(a, b);
}

#[test]
fn config_file_and_overrides_combine() {
    let base = "# experiment\ngraph=star\nn=5\nalgorithm=samplayer\nl0=1\nsamples=10\n";
    let cfg = ExperimentConfig::with_overrides(base, &["samples=25".to_string(), "start=1".to_string()]).unwrap();
    assert_eq!(cfg.samples, 25);
    assert_eq!(cfg.start, 1);
    assert!(ExperimentConfig::with_overrides(base, &["no_such_key=1".to_string()]).is_err());
}

#[test]
fn cli_writes_csv_to_the_output_directory() {
    let dir = std::env::temp_dir().join(format!("samplayer-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_samplayer"))
        .args(["qc", "graph=star", "n=5", "start=1", "l0=1", "s1=10", "s2=10", "samples=20"])
        .env(OUT_DIR_ENV, &dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("amortized_qps="), "{stdout}");
    let csv = std::fs::read_to_string(dir.join("qc-samplayer.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.contains("cumulative_queries"), "{header}");
    assert_eq!(csv.lines().count(), 21);
    std::fs::remove_dir_all(&dir).unwrap();
}
