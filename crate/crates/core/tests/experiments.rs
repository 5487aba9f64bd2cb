use bergman_core::experiments::{run, Experiment, ExperimentConfig, Format};
use proptest::prelude::*;

fn small(e: Experiment) -> ExperimentConfig {
    let mut c = ExperimentConfig::preset(e);
    c.depth_max = c.depth_max.min(c.depth_min + 2);
    if e == Experiment::LowerBoundTrend {
        c.depth_max = 8;
        c.projector_depth = None;
    }
    c
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = std::env::temp_dir().join(format!("bergman-det-{}", std::process::id()));
    for e in [Experiment::WeakType, Experiment::B1ImpliesBp, Experiment::UniformDomainEquivalence] {
        let c = small(e);
        let a = run(&c).unwrap();
        let b = run(&c).unwrap();
        let fa = a.emit(&dir.join("a"), Format::Csv).unwrap();
        let fb = b.emit(&dir.join("b"), Format::Csv).unwrap();
        assert_eq!(fa.len(), fb.len());
        for (x, y) in fa.iter().zip(&fb) {
            assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap(), "{}", x.display());
        }
    }
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn small_presets_run_and_pass() {
    for e in Experiment::ALL {
        let r = run(&small(e)).unwrap();
        assert!(!r.tables.is_empty() && !r.verdicts.is_empty(), "{e}");
    }
}

#[test]
fn config_file_written_next_to_tables_reloads() {
    let dir = std::env::temp_dir().join(format!("bergman-cfg-{}", std::process::id()));
    let c = small(Experiment::WeakType);
    let files = run(&c).unwrap().emit(&dir, Format::Csv).unwrap();
    let cfg = files.iter().find(|p| p.to_string_lossy().ends_with("_config.json")).unwrap();
    assert_eq!(ExperimentConfig::load(cfg).unwrap(), c);
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn bad_exponent_is_rejected_by_name() {
    let mut c = ExperimentConfig::preset(Experiment::UniformDomainEquivalence);
    c.s = Some(1.0);
    assert!(run(&c).unwrap_err().to_string().contains("s must exceed 1"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_json_round_trips(
        k in 0usize..6,
        p in 1.01f64..8.0,
        lo in 0u32..6,
        span in 0u32..6,
        seed in any::<u64>(),
        scale in 0.01f64..100.0,
        a in -0.9f64..0.9,
    ) {
        let mut c = ExperimentConfig::preset(Experiment::ALL[k]);
        c.p = Some(p);
        c.depth_min = lo;
        c.depth_max = lo + span;
        c.seed = seed;
        c.lambdas.scale = scale;
        c.alphas = vec![a];
        let back: ExperimentConfig = serde_json::from_str(&c.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }
}
