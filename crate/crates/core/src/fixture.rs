//! The 2019 Italian airports population: 30 DMUs, four inputs, four
//! outputs. Traffic outputs are shares of the national total in percent;
//! production costs and revenues are in thousands of euros.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::dataset::{Dataset, DmuRecord};

pub const INPUT_NAMES: [&str; 4] = ["EMPLOYEES", "CHINDESKS", "RUNWAYMT", "PRODCOSTS"];
pub const OUTPUT_NAMES: [&str; 4] = ["TOTPAX", "GOODS", "TOTPLANES", "TOTREVENUES"];

pub struct FixtureRow {
    pub id: &'static str,
    pub name: &'static str,
    pub group: bool,
    pub inputs: [f64; 4],
    pub outputs: [f64; 4],
}

#[rustfmt::skip]
pub const ROWS: [FixtureRow; 30] = [
    FixtureRow { id: "AHO", name: "Alghero-Fertilia", group: false, inputs: [206.0, 17.0, 3000.0, 16831.127], outputs: [0.72, 0.0001, 0.6987, 18469.917] },
    FixtureRow { id: "AOI", name: "Ancona-Falconara", group: false, inputs: [81.0, 12.0, 2991.0, 14504.889], outputs: [0.2504, 0.6582, 0.3991, 7305.324] },
    FixtureRow { id: "BRI-BDS-FOG-TAR", name: "Bari-Brindisi-Foggia-Taranto", group: true, inputs: [334.0, 46.0, 10408.0, 97032.699], outputs: [4.3116, 1.0228, 3.97, 105012.485] },
    FixtureRow { id: "BGY", name: "Bergamo-Orio Al Serio", group: false, inputs: [229.0, 45.0, 3024.0, 120833.675], outputs: [7.1958, 11.286, 6.3018, 141991.349] },
    FixtureRow { id: "BLQ", name: "Bologna-Borgo Panigale", group: false, inputs: [519.0, 74.0, 2880.0, 89300.0], outputs: [4.9173, 3.6062, 5.0179, 119180.0] },
    FixtureRow { id: "BZO", name: "Bolzano", group: false, inputs: [25.0, 3.0, 1275.0, 5410.697], outputs: [0.0006, 0.0, 0.0027, 4331.885] },
    FixtureRow { id: "CAG", name: "Cagliari-Elmas", group: false, inputs: [152.0, 42.0, 2805.0, 49607.435], outputs: [2.4845, 0.4035, 2.3831, 54512.496] },
    FixtureRow { id: "CTA", name: "Catania-Fontanarossa", group: false, inputs: [164.0, 46.0, 2438.0, 69424.486], outputs: [5.3022, 0.5473, 5.03, 88966.239] },
    FixtureRow { id: "CUF", name: "Cuneo-Levaldigi", group: false, inputs: [25.0, 6.0, 2104.0, 3774.196], outputs: [0.0467, 0.0, 0.0425, 3034.098] },
    FixtureRow { id: "FLR-PSA", name: "Firenze-Pisa", group: true, inputs: [336.0, 56.0, 4752.0, 78678.0], outputs: [4.2795, 1.2043, 4.5903, 99416.0] },
    FixtureRow { id: "GOA", name: "Genova-Sestri", group: false, inputs: [203.0, 11.0, 3065.0, 31435.988], outputs: [0.8001, 0.0136, 1.0279, 33104.356] },
    FixtureRow { id: "SUF-REG-CRV", name: "LameziaTerme-ReggioCalabria-Crotone", group: true, inputs: [123.0, 33.0, 6396.0, 27281.702], outputs: [1.8378, 0.1194, 1.7813, 29632.95] },
    FixtureRow { id: "LIN-MXP", name: "Milano-Linate-Malpensa", group: true, inputs: [2731.0, 293.0, 10282.0, 568600.0], outputs: [18.3179, 53.6279, 20.5384, 736699.0] },
    FixtureRow { id: "NAP", name: "Napoli-Capodichino", group: false, inputs: [509.0, 55.0, 2640.0, 110375.234], outputs: [5.6315, 0.9419, 5.3884, 150788.081] },
    FixtureRow { id: "OLB", name: "Olbia-Costa Smeralda", group: false, inputs: [273.0, 36.0, 2446.0, 34824.882], outputs: [1.5237, 0.0086, 1.5346, 55099.748] },
    FixtureRow { id: "PMO", name: "Palermo-Punta Raisi", group: false, inputs: [266.0, 28.0, 3326.0, 70545.618], outputs: [3.6678, 0.1108, 3.5852, 78751.919] },
    FixtureRow { id: "PMF", name: "Parma", group: false, inputs: [33.0, 9.0, 2300.0, 5159.244], outputs: [0.0376, 0.0, 0.0355, 1908.23] },
    FixtureRow { id: "PEG", name: "Perugia", group: false, inputs: [36.0, 2.0, 2199.0, 5004.722], outputs: [0.1134, 0.0, 0.1026, 4853.245] },
    FixtureRow { id: "PSR", name: "Pescara", group: false, inputs: [38.0, 8.0, 2430.0, 9113.769], outputs: [0.3635, 0.0253, 0.3482, 9163.377] },
    FixtureRow { id: "RMI", name: "Rimini-Miramare", group: false, inputs: [20.0, 7.0, 2995.0, 6379.335], outputs: [0.205, 0.0004, 0.1768, 7541.669] },
    FixtureRow { id: "CIA-FCO", name: "Roma-Ciampino-Fiumicino", group: true, inputs: [1401.0, 461.0, 16909.0, 703507.0], outputs: [25.5993, 20.1545, 23.7787, 1109272.0] },
    FixtureRow { id: "TRN", name: "Torino-Caselle", group: false, inputs: [233.0, 38.0, 3300.0, 53765.124], outputs: [2.0616, 0.0193, 2.381, 67133.138] },
    FixtureRow { id: "TPS", name: "Trapani-Birgi", group: false, inputs: [74.0, 15.0, 2690.0, 8873.848], outputs: [0.2113, 0.0011, 0.3097, 4628.598] },
    FixtureRow { id: "TSF", name: "Treviso-Sant'Angelo", group: false, inputs: [165.0, 16.0, 2459.0, 27540.456], outputs: [1.688, 0.0, 1.3079, 29301.408] },
    FixtureRow { id: "TRS", name: "Trieste-Ronchi dei Legionari", group: false, inputs: [108.0, 12.0, 3000.0, 13982.967], outputs: [0.4053, 0.0064, 0.5843, 17185.147] },
    FixtureRow { id: "VIC", name: "Venezia-Tessera", group: false, inputs: [470.0, 60.0, 6080.0, 126366.0], outputs: [5.999, 4.9311, 6.1286, 202848.0] },
    FixtureRow { id: "VRN-VBS", name: "Verona-Brescia", group: true, inputs: [129.0, 48.0, 6058.0, 41847.787], outputs: [1.8842, 1.3095, 2.2578, 46947.79] },
    FixtureRow { id: "LMP", name: "Lampedusa", group: false, inputs: [44.0, 4.0, 1800.0, 4818.552], outputs: [0.1434, 0.0017, 0.2883, 4204.858] },
    FixtureRow { id: "EBA", name: "Elba", group: false, inputs: [10.0, 4.0, 1095.0, 1082.177], outputs: [0.001, 0.0, 0.0082, 1117.699] },
    FixtureRow { id: "GRS", name: "Grosseto", group: false, inputs: [5.0, 2.0, 3007.0, 760.192], outputs: [0.0001, 0.0, 0.0004, 788.357] },
];

pub fn bundled_fixture() -> Dataset {
    let dmus = ROWS
        .iter()
        .map(|r| {
            DmuRecord::new(r.id, r.inputs.to_vec(), r.outputs.to_vec())
                .with_name(r.name)
                .with_group(r.group)
        })
        .collect();
    Dataset::new(names(&INPUT_NAMES), names(&OUTPUT_NAMES), dmus).expect("bundled fixture is valid")
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_flags() {
        let ds = bundled_fixture();
        assert_eq!((ds.n(), ds.m(), ds.s()), (30, 4, 4));
        assert_eq!(ds.dmus().iter().filter(|d| d.group).count(), 6);
        let d = ds.discrimination();
        assert!(d.strong_rule && d.weak_rule);
    }

    #[test]
    fn milano_row() {
        let ds = bundled_fixture();
        let j = ds.index_of("LIN-MXP").unwrap();
        let d = ds.dmu(j);
        assert_eq!(d.name, "Milano-Linate-Malpensa");
        assert_eq!(d.inputs[0], 2731.0);
        assert_eq!(d.outputs[0], 18.3179);
        assert!(d.group);
    }

    #[test]
    fn grosseto_has_zero_goods() {
        let ds = bundled_fixture();
        assert_eq!(ds.dmu(ds.index_of("GRS").unwrap()).outputs[1], 0.0);
    }
}
