use effx_core::dea::{efficiency, run_frontier};
use effx_core::fixture::bundled_fixture;
use effx_core::{Dataset, DeaOptions, DmuRecord, ReturnsToScale, Rts};
use effx_testkit::{dea_oracle_score, random_dea_data, rng};
use proptest::prelude::*;

const TOL: f64 = 1e-7;

fn scores(ds: &Dataset, rts: ReturnsToScale) -> Vec<f64> {
    let opts = DeaOptions::default().with_rts(rts);
    (0..ds.n()).map(|j| efficiency(ds, j, &opts).unwrap()).collect()
}

fn names(prefix: &str, k: usize) -> Vec<String> {
    (0..k).map(|i| format!("{prefix}{i}")).collect()
}

fn dataset(inputs: &[Vec<f64>], outputs: &[Vec<f64>]) -> Dataset {
    let dmus = inputs
        .iter()
        .zip(outputs)
        .enumerate()
        .map(|(j, (x, y))| DmuRecord::new(format!("u{j}"), x.clone(), y.clone()))
        .collect();
    Dataset::new(names("x", inputs[0].len()), names("y", outputs[0].len()), dmus).unwrap()
}

/// Rebuilds the dataset with `f` applied to every DMU's (inputs, outputs).
fn map_dmus(ds: &Dataset, f: impl Fn(&mut Vec<f64>, &mut Vec<f64>)) -> Dataset {
    let dmus = ds
        .dmus()
        .iter()
        .map(|d| {
            let mut d = d.clone();
            f(&mut d.inputs, &mut d.outputs);
            d
        })
        .collect();
    Dataset::new(ds.input_names().to_vec(), ds.output_names().to_vec(), dmus).unwrap()
}

fn assert_close(a: &[f64], b: &[f64]) -> Result<(), TestCaseError> {
    for (j, (p, q)) in a.iter().zip(b).enumerate() {
        prop_assert!((p - q).abs() <= TOL, "unit {j}: {p} vs {q}");
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn units_invariance(column in 0usize..8, log_factor in -6.0f64..6.0) {
        let ds = bundled_fixture();
        let factor = 10f64.powf(log_factor);
        let m = ds.m();
        let scaled = map_dmus(&ds, |x, y| {
            if column < m { x[column] *= factor } else { y[column - m] *= factor }
        });
        for rts in [ReturnsToScale::Constant, ReturnsToScale::Variable] {
            assert_close(&scores(&ds, rts), &scores(&scaled, rts))?;
        }
    }

    #[test]
    fn output_translation_leaves_vrs_scores(column in 0usize..4, shift in 0.0f64..500.0) {
        let ds = bundled_fixture();
        let shifted = map_dmus(&ds, |_, y| y[column] += shift);
        assert_close(&scores(&ds, ReturnsToScale::Variable), &scores(&shifted, ReturnsToScale::Variable))?;
    }

    #[test]
    fn dominated_unit_changes_nothing(
        seed in any::<u64>(),
        n in 2usize..=8,
        base in 0usize..8,
        worse_in in proptest::collection::vec(0.0f64..2.0, 2),
        worse_out in proptest::collection::vec(0.0f64..1.0, 2),
    ) {
        let (mut xs, mut ys) = random_dea_data(&mut rng(seed), n, 2, 2);
        let before = dataset(&xs, &ys);
        let k = base % n;
        let x: Vec<f64> = xs[k].iter().zip(&worse_in).map(|(v, w)| v * (1.0 + w)).collect();
        let y: Vec<f64> = ys[k].iter().zip(&worse_out).map(|(v, w)| v * (1.0 - w)).collect();
        xs.push(x);
        ys.push(y);
        let after = dataset(&xs, &ys);
        for rts in [ReturnsToScale::Constant, ReturnsToScale::Variable] {
            assert_close(&scores(&before, rts), &scores(&after, rts)[..n])?;
        }
    }

    #[test]
    fn nesting_and_self_bound(seed in any::<u64>(), n in 1usize..=10, m in 1usize..=3, s in 1usize..=3) {
        let (xs, ys) = random_dea_data(&mut rng(seed), n, m, s);
        let ds = dataset(&xs, &ys);
        let crs = scores(&ds, ReturnsToScale::Constant);
        let vrs = scores(&ds, ReturnsToScale::Variable);
        for (o, p) in crs.iter().zip(&vrs) {
            prop_assert!(*o > 0.0 && *o <= 1.0 + 1e-6);
            prop_assert!(*p <= 1.0 + 1e-6);
            prop_assert!(*p >= *o - TOL);
        }
    }

    #[test]
    fn small_instances_match_vertex_enumeration(seed in any::<u64>(), n in 1usize..=6) {
        let (xs, ys) = random_dea_data(&mut rng(seed), n, 2, 2);
        let ds = dataset(&xs, &ys);
        for (rts, vrs) in [(ReturnsToScale::Constant, false), (ReturnsToScale::Variable, true)] {
            let got = scores(&ds, rts);
            for (j, g) in got.iter().enumerate() {
                let want = dea_oracle_score(&xs, &ys, j, vrs);
                prop_assert!((g - want).abs() <= TOL, "unit {j} vrs={vrs}: {g} vs {want}");
            }
        }
    }
}

#[test]
fn fixture_headline_counts() {
    let report = run_frontier(&bundled_fixture(), &DeaOptions::default()).unwrap();
    assert_eq!(report.crs_efficient, 6);
    assert_eq!(report.vrs_efficient, 12);
    assert!((0.785..=0.795).contains(&report.mean_ote));
    assert!((0.874..=0.884).contains(&report.mean_pte));
    assert_eq!(report.rts_count(Rts::Constant), 6);
    assert_eq!(report.rts_count(Rts::Increasing), 24);
    assert_eq!(report.rts_count(Rts::Decreasing), 0);
    for r in &report.results {
        assert!(r.pte + 1e-12 >= r.ote);
        assert!((r.se - r.ote / r.pte).abs() < 1e-12);
        // Constant RTS coincides with scale efficiency here.
        assert_eq!(r.rts == Rts::Constant, r.crs_efficient(1e-6), "{}", r.dmu_id);
    }
}

#[test]
fn alghero_and_bolzano_prose_values() {
    let ds = bundled_fixture();
    let report = run_frontier(&ds, &DeaOptions::default()).unwrap();
    let alghero = &report.results[ds.index_of("AHO").unwrap()];
    assert!((alghero.pte - 0.7622).abs() <= 1e-3);
    assert!((alghero.se - 0.9678).abs() <= 1e-3);
    let bolzano = &report.results[ds.index_of("BZO").unwrap()];
    assert!((bolzano.ote - 0.4988).abs() <= 1e-3);
    assert!(bolzano.vrs_efficient(1e-6));
}
