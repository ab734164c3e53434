//! Round-trips quantum maps through their JSON file representation and
//! runs a scan with a map loaded from disk — the same format the CLI's
//! `--map` flag accepts.
//!
//! Run with: cargo run --example map_files

use qcausality::cli::{load_map_file, parse_map_spec, write_map_file};
use qcausality::interferometer::{angle_grid, probe_map_preset, InterferometerParams, scan};
use qcausality::maps::{random_kraus_channel, sub_rng, QuantumMap};

fn main() {
    let dir = std::env::temp_dir().join("qcausality-map-files");
    std::fs::create_dir_all(&dir).unwrap();

    // A random 3-dimensional channel, written and re-loaded bit-exactly.
    let mut rng = sub_rng(1, 0);
    let channel = QuantumMap::Kraus(random_kraus_channel(3, &mut rng));
    let kraus_path = dir.join("random_channel.json");
    write_map_file(&kraus_path, &channel).unwrap();
    println!("wrote {}", kraus_path.display());

    let loaded = load_map_file(&kraus_path).unwrap();
    println!("reloaded: dim = {}, kind = kraus", loaded.dim());

    // The nonlinear probe transform in the same format.
    let hm_path = dir.join("probe_map.json");
    write_map_file(&hm_path, &QuantumMap::Hm(probe_map_preset())).unwrap();
    println!("wrote {}", hm_path.display());
    println!("{}", std::fs::read_to_string(&hm_path).unwrap());

    // parse_map_spec accepts presets, kraus:<path>, or a plain path.
    let spec = format!("kraus:{}", kraus_path.display());
    let map = parse_map_spec(&spec).unwrap();
    let base = InterferometerParams::real(0.1, 0.1, 0.1, 0.0, 0.0);
    let result = scan(&base, &angle_grid(4), &angle_grid(4), &map).unwrap();
    println!(
        "scan under the loaded channel: {} rows, first signal = {:+.6e}",
        result.rows.len(),
        result.rows[0].signal
    );
}
