use effx::io::{parse_dataset, serialize_dataset, Schema};
use effx_core::{Dataset, DmuRecord};
use proptest::prelude::*;

fn record() -> impl Strategy<Value = (String, Vec<f64>, Vec<f64>, bool)> {
    (
        "[A-Za-z0-9 ,\"'-]{0,12}",
        proptest::collection::vec(1e-6f64..1e9, 2),
        proptest::collection::vec(prop_oneof![Just(0.0), 0.0f64..1e9], 3),
        any::<bool>(),
    )
}

proptest! {
    #[test]
    fn serialize_then_parse_is_identity(rows in proptest::collection::vec(record(), 1..20)) {
        let dmus = rows
            .into_iter()
            .enumerate()
            .map(|(j, (name, x, y, g))| {
                let mut d = DmuRecord::new(format!("u{j}"), x, y).with_group(g);
                if !name.trim().is_empty() {
                    d = d.with_name(name.trim());
                }
                d
            })
            .collect();
        let schema = Schema {
            inputs: vec!["a".into(), "b".into()],
            outputs: vec!["p".into(), "q".into(), "r".into()],
        };
        let ds = Dataset::new(schema.inputs.clone(), schema.outputs.clone(), dmus).unwrap();
        let text = serialize_dataset(&ds);
        prop_assert_eq!(parse_dataset(&text, &schema).unwrap(), ds);
    }
}
