use dsholo::report::{emit_residual_table, residual_table_csv};
use dsholo::verify::{sweep, SweepConfig, SweepKind};

#[test]
fn expansion_sweep_shape_and_trend() {
    let cfg = SweepConfig::default();
    let rows = sweep(SweepKind::Expansion, &cfg).unwrap();
    assert_eq!(rows.len(), 9);
    for (chunk, eps) in rows.chunks(3).zip(&cfg.epsilon_values) {
        assert!(chunk.iter().all(|r| r.epsilon == *eps));
        assert_eq!(chunk.iter().map(|r| r.lmax).collect::<Vec<_>>(), cfg.lmax_values);
        for w in chunk.windows(2) {
            assert!(w[1].residual <= w[0].residual, "{w:?}");
        }
    }
    // larger shifts converge faster at every cutoff
    for k in 0..3 {
        assert!(rows[6 + k].residual < rows[k].residual);
    }
}

#[test]
fn kernel_sweep_decreases_with_cutoff() {
    let cfg = SweepConfig { lmax_values: vec![5, 10, 20, 30], epsilon_values: vec![0.1], ..SweepConfig::default() };
    let rows = sweep(SweepKind::Kernel, &cfg).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].residual < w[0].residual, "{w:?}");
    }
}

#[test]
fn empty_sweep_is_header_only() {
    let cfg = SweepConfig { lmax_values: vec![], ..SweepConfig::default() };
    let rows = sweep(SweepKind::Expansion, &cfg).unwrap();
    assert_eq!(residual_table_csv(&rows).unwrap(), "Lmax,epsilon,residual\n");
}

#[test]
fn same_seed_same_bytes() {
    let dir = std::env::temp_dir().join(format!("dsholo-sweep-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = SweepConfig { seed: 42, ..SweepConfig::default() };
    let (a, b) = (dir.join("a.csv"), dir.join("b.csv"));
    emit_residual_table(&sweep(SweepKind::Kernel, &cfg).unwrap(), &a).unwrap();
    emit_residual_table(&sweep(SweepKind::Kernel, &cfg).unwrap(), &b).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let other = sweep(SweepKind::Kernel, &SweepConfig { seed: 43, ..cfg }).unwrap();
    assert_ne!(residual_table_csv(&other).unwrap(), std::fs::read_to_string(&a).unwrap());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn invalid_sweeps_are_config_errors() {
    let bad = SweepConfig { nu: 0.0, ..SweepConfig::default() };
    assert!(matches!(sweep(SweepKind::Expansion, &bad), Err(dsholo::Error::Config(_))));
    let bad = SweepConfig { epsilon_values: vec![0.0], ..SweepConfig::default() };
    assert!(sweep(SweepKind::Kernel, &bad).is_err());
    assert!("spectrum".parse::<SweepKind>().is_err());
}
