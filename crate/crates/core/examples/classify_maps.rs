//! Classifies several probe-side maps as linear, nonlinear but
//! nonsignaling, or signaling, using the randomized linearity probe and
//! the reduced-state signaling criterion.
//!
//! Run with: cargo run --example classify_maps

use nalgebra::DMatrix;
use num_complex::Complex64;
use qcausality::interferometer::{full_space, probe_map_preset};
use qcausality::maps::{KrausChannel, QuantumMap, Split};
use qcausality::signaling::classify;

fn main() {
    let space = full_space();
    let split = Split::at(&space, 2).unwrap();

    // Dephasing on the probe mode: diagonal Kraus projectors.
    let dephasing = QuantumMap::Kraus(
        KrausChannel::new(
            (0..3)
                .map(|k| {
                    DMatrix::from_fn(3, 3, |i, j| {
                        if i == k && j == k {
                            Complex64::new(1.0, 0.0)
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    })
                })
                .collect(),
        )
        .unwrap(),
    );

    let candidates: [(&str, QuantumMap); 3] = [
        ("identity", QuantumMap::Identity { dim: 3 }),
        ("probe dephasing", dephasing),
        ("nonlinear probe map", QuantumMap::Hm(probe_map_preset())),
    ];

    for (name, map) in candidates {
        let cls = classify(&map, &space, &split, 100, 1e-6, 7).unwrap();
        println!(
            "{name:22} -> {:?}  (linearity deviation {:.2e}, signaling deviation {:.2e})",
            cls.class_label, cls.linearity_deviation, cls.signaling_deviation
        );
    }
}
