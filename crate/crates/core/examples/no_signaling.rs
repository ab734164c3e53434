//! Demonstrates the no-signaling theorem numerically: random linear
//! channels acting only on the escaping probe mode never move the
//! laboratory reduced state, while the nonlinear probe map does.
//!
//! Run with: cargo run --example no_signaling

use qcausality::interferometer::{build_output_state, full_space, probe_map_preset, InterferometerParams};
use qcausality::maps::{lift_local, random_kraus_channel, sub_rng, QuantumMap};
use qcausality::signaling::reduced_deviation;
use std::f64::consts::PI;

fn main() {
    let space = full_space();
    let params = InterferometerParams::real(0.1, 0.1, 0.1, PI / 4.0, 5.0 * PI / 8.0);
    let rho = build_output_state(&params).unwrap().to_density();

    let mut worst: f64 = 0.0;
    for i in 0..200u64 {
        let mut rng = sub_rng(2024, i);
        let ch = QuantumMap::Kraus(random_kraus_channel(3, &mut rng));
        let lifted = lift_local(&ch, &space, 2).unwrap();
        let dev = reduced_deviation(&lifted, &rho, &[0, 1]).unwrap();
        worst = worst.max(dev);
    }
    println!("200 random probe-side channels:");
    println!("  max |Tr_probe[E(rho)] - Tr_probe[rho]| = {worst:.3e}  (pure rounding noise)");

    let hm = lift_local(&QuantumMap::Hm(probe_map_preset()), &space, 2).unwrap();
    let dev = reduced_deviation(&hm, &rho, &[0, 1]).unwrap();
    println!("nonlinear probe map on the same state:");
    println!("  deviation = {dev:.6e}  -> an operation behind the horizon changes lab statistics");
}
