//! The two-crystal aligned-signal-beam interferometer: output state,
//! detector projectors, click probabilities, probe-map evolution, and
//! 2-D (phi, theta) interference scans.
//!
//! The state space is fixed: two-level "up" and "down" idler modes and a
//! three-level escaping probe mode with basis {vacuum, photon in the
//! original polarization, photon in the orthogonal polarization}, in that
//! order. Flat indexing follows the crate-wide leftmost-slowest convention.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    partial_trace, projector_from_vector, ComplexMatrix, ComplexVector, DensityOperator,
    SpaceStructure, StateVector,
};
use crate::maps::{apply_hm, lift_local, HmMap, QuantumMap};

/// Dimension of the escaping probe mode.
pub const PROBE_DIM: usize = 3;
/// Index of the probe factor in the full space.
pub const PROBE_FACTOR: usize = 2;

/// Probabilities within this distance of [0,1] are clamped; anything
/// further out is a numerical-integrity error.
const PROB_SLACK: f64 = 1e-12;

pub fn full_space() -> SpaceStructure {
    SpaceStructure::new(vec![2, 2, PROBE_DIM]).expect("static dims")
}

pub fn lab_space() -> SpaceStructure {
    SpaceStructure::new(vec![2, 2]).expect("static dims")
}

/// Pump amplitude, down-conversion efficiencies, phase delay and
/// polarization-rotator coefficients defining the output state.
#[derive(Clone, Debug)]
pub struct InterferometerParams {
    pub v: Complex64,
    pub f1: Complex64,
    pub f2: Complex64,
    /// Phase delay on the "up" idler beam, radians.
    pub phi: f64,
    a: Complex64,
    b: Complex64,
}

impl InterferometerParams {
    /// Requires |a|² + |b|² = 1 within 1e-10.
    pub fn new(
        v: Complex64,
        f1: Complex64,
        f2: Complex64,
        phi: f64,
        a: Complex64,
        b: Complex64,
    ) -> Result<Self> {
        let s = a.norm_sqr() + b.norm_sqr();
        if (s - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "|a|^2 + |b|^2 = {s} must equal 1"
            )));
        }
        Ok(Self { v, f1, f2, phi, a, b })
    }

    /// Real rotator coefficients (a, b) = (cos theta, sin theta).
    pub fn from_theta(v: Complex64, f1: Complex64, f2: Complex64, phi: f64, theta: f64) -> Self {
        Self {
            v,
            f1,
            f2,
            phi,
            a: Complex64::new(theta.cos(), 0.0),
            b: Complex64::new(theta.sin(), 0.0),
        }
    }

    /// Convenience for real-valued pump and efficiencies.
    pub fn real(v: f64, f1: f64, f2: f64, phi: f64, theta: f64) -> Self {
        Self::from_theta(
            Complex64::new(v, 0.0),
            Complex64::new(f1, 0.0),
            Complex64::new(f2, 0.0),
            phi,
            theta,
        )
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    /// The state truncation drops terms of order |V f1 f2|²; flag parameter
    /// regimes where that truncation is physically dubious. Advisory only.
    pub fn regime_warning(&self) -> Option<String> {
        let mut notes = Vec::new();
        for (name, f) in [("f1", self.f1), ("f2", self.f2)] {
            if f.norm() > 0.3 {
                notes.push(format!("|{name}| = {:.3} > 0.3", f.norm()));
            }
            if (self.v * f).norm() > 0.3 {
                notes.push(format!("|V {name}| = {:.3} > 0.3", (self.v * f).norm()));
            }
        }
        if notes.is_empty() {
            None
        } else {
            Some(notes.join(", "))
        }
    }

    /// N² = 1 + |V|²(|f1|² + |f2|²).
    pub fn normalization_sq(&self) -> f64 {
        1.0 + self.v.norm_sqr() * (self.f1.norm_sqr() + self.f2.norm_sqr())
    }
}

/// Output state: [ |000⟩ + V f1 e^{i phi} |10⟩(a|1⟩ + b|-1⟩) + V f2 |011⟩ ] / N.
pub fn build_output_state(params: &InterferometerParams) -> Result<StateVector> {
    let space = full_space();
    let n = params.normalization_sq().sqrt();
    let inv_n = Complex64::new(1.0 / n, 0.0);
    let phase = Complex64::from_polar(1.0, params.phi);
    let up = params.v * params.f1 * phase;

    let mut amps = ComplexVector::zeros(space.total_dim());
    amps[space.ravel(&[0, 0, 0])] = inv_n;
    amps[space.ravel(&[1, 0, 1])] = up * params.a * inv_n;
    amps[space.ravel(&[1, 0, 2])] = up * params.b * inv_n;
    amps[space.ravel(&[0, 1, 1])] = params.v * params.f2 * inv_n;
    StateVector::new(space, amps)
}

/// The two detector projections on the full space.
#[derive(Clone, Debug)]
pub struct DetectorProjectors {
    pub p_a: ComplexMatrix,
    pub p_b: ComplexMatrix,
}

/// alpha = (|01⟩ + i|10⟩)/√2 on the laboratory space.
pub fn alpha_vector() -> StateVector {
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = ComplexVector::zeros(4);
    amps[1] = Complex64::new(inv, 0.0);
    amps[2] = Complex64::new(0.0, inv);
    StateVector::new(lab_space(), amps).expect("normalized by construction")
}

/// beta = (|10⟩ + i|01⟩)/√2 on the laboratory space.
pub fn beta_vector() -> StateVector {
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = ComplexVector::zeros(4);
    amps[2] = Complex64::new(inv, 0.0);
    amps[1] = Complex64::new(0.0, inv);
    StateVector::new(lab_space(), amps).expect("normalized by construction")
}

/// Rank-1 laboratory projectors P_alpha, P_beta.
pub fn lab_projectors() -> (ComplexMatrix, ComplexMatrix) {
    (
        projector_from_vector(&alpha_vector()),
        projector_from_vector(&beta_vector()),
    )
}

/// P_A = P_alpha ⊗ I_probe, P_B = P_beta ⊗ I_probe.
pub fn detector_projectors() -> DetectorProjectors {
    let (pa, pb) = lab_projectors();
    let ie = ComplexMatrix::identity(PROBE_DIM, PROBE_DIM);
    DetectorProjectors {
        p_a: pa.kronecker(&ie),
        p_b: pb.kronecker(&ie),
    }
}

fn check_probability(p: f64, which: &str) -> Result<f64> {
    if !(-PROB_SLACK..=1.0 + PROB_SLACK).contains(&p) {
        return Err(Error::NumericalIntegrity(format!(
            "probability {which} = {p:e} outside [0,1]"
        )));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Click probabilities p_X = Tr(P_X rho) for a full-space state.
pub fn click_probabilities(rho: &DensityOperator) -> Result<(f64, f64)> {
    if rho.space() != &full_space() {
        return Err(Error::DimensionMismatch {
            expected: full_space().total_dim(),
            got: rho.space().total_dim(),
        });
    }
    let det = detector_projectors();
    let p_a = (&det.p_a * rho.matrix()).trace().re;
    let p_b = (&det.p_b * rho.matrix()).trace().re;
    Ok((check_probability(p_a, "p_A")?, check_probability(p_b, "p_B")?))
}

/// Closed-form click probabilities
/// p_{A,B} = |V|²/(2N²) [ |f1|² + |f2|² ± 2 Re(i f1* f2 a* e^{-i phi}) ].
pub fn closed_form_probabilities(params: &InterferometerParams) -> (f64, f64) {
    let n2 = params.normalization_sq();
    let v2 = params.v.norm_sqr();
    let base = params.f1.norm_sqr() + params.f2.norm_sqr();
    let interference = 2.0
        * (Complex64::i()
            * params.f1.conj()
            * params.f2
            * params.a.conj()
            * Complex64::from_polar(1.0, -params.phi))
        .re;
    let scale = v2 / (2.0 * n2);
    (scale * (base + interference), scale * (base - interference))
}

/// The probe transform used throughout as the reference nonlinear map:
/// it fixes the vacuum and the original polarization mode and sends the
/// orthogonal mode |-1⟩ to |-1⟩ - |1⟩.
pub fn probe_map_preset() -> HmMap {
    let c = |re: f64| Complex64::new(re, 0.0);
    HmMap::new(ComplexMatrix::from_row_slice(
        3,
        3,
        &[
            c(1.),
            c(0.),
            c(0.),
            c(0.),
            c(1.),
            c(-1.),
            c(0.),
            c(0.),
            c(1.),
        ],
    ))
    .expect("preset transform is nonsingular")
}

/// Click probabilities after the nonlinear probe map acts on the escaping
/// mode of the pure output state.
pub fn hm_probabilities(params: &InterferometerParams, map: &HmMap) -> Result<(f64, f64)> {
    if map.dim() != PROBE_DIM {
        return Err(Error::DimensionMismatch {
            expected: PROBE_DIM,
            got: map.dim(),
        });
    }
    let psi = build_output_state(params)?;
    let evolved = apply_hm(map, &psi.to_density(), PROBE_FACTOR)?;
    click_probabilities(&evolved)
}

/// Closed-form interference signal under the preset probe transform:
/// p*_A - p*_B = 2|V|²/N*² Re[ i f1* f2 (a* - b*) e^{-i phi} ],
/// N*² = 1 + |V|² [ |f2|² + |f1|² (|a-b|² + |b|²) ].
///
/// Valid only for [`probe_map_preset`]; arbitrary transforms must go
/// through the numerical pipeline.
pub fn hm_signal_closed_form(params: &InterferometerParams) -> f64 {
    let v2 = params.v.norm_sqr();
    let n_star_sq = 1.0
        + v2 * (params.f2.norm_sqr()
            + params.f1.norm_sqr() * ((params.a - params.b).norm_sqr() + params.b.norm_sqr()));
    2.0 * v2 / n_star_sq
        * (Complex64::i()
            * params.f1.conj()
            * params.f2
            * (params.a.conj() - params.b.conj())
            * Complex64::from_polar(1.0, -params.phi))
        .re
}

/// One grid point of an interference scan.
#[derive(Clone, Debug)]
pub struct ScanRow {
    pub phi: f64,
    pub theta: f64,
    pub p_a: f64,
    pub p_b: f64,
    pub signal: f64,
}

/// A full (phi, theta) scan with its provenance.
#[derive(Clone, Debug)]
pub struct ScanResult {
    pub rows: Vec<ScanRow>,
    pub v: Complex64,
    pub f1: Complex64,
    pub f2: Complex64,
    pub map_description: String,
    pub phi_points: usize,
    pub theta_points: usize,
}

/// Evaluates the interference surface on the grid, phi-major. The map acts
/// on the escaping probe mode before detection; the identity map reproduces
/// the closed-form linear surface.
pub fn scan(
    base: &InterferometerParams,
    phi_grid: &[f64],
    theta_grid: &[f64],
    map: &QuantumMap,
) -> Result<ScanResult> {
    if phi_grid.is_empty() || theta_grid.is_empty() {
        return Err(Error::InvalidArgument("scan grids must be nonempty".into()));
    }
    let space = full_space();
    let lifted = if map.dim() == space.total_dim() {
        map.clone()
    } else {
        lift_local(map, &space, PROBE_FACTOR)?
    };

    let mut rows = Vec::with_capacity(phi_grid.len() * theta_grid.len());
    for &phi in phi_grid {
        for &theta in theta_grid {
            let params = InterferometerParams::from_theta(base.v, base.f1, base.f2, phi, theta);
            let psi = build_output_state(&params)?;
            let rho = lifted.apply(&psi.to_density())?;
            let (p_a, p_b) = click_probabilities(&rho)?;
            rows.push(ScanRow {
                phi,
                theta,
                p_a,
                p_b,
                signal: p_a - p_b,
            });
        }
    }
    Ok(ScanResult {
        rows,
        v: base.v,
        f1: base.f1,
        f2: base.f2,
        map_description: format!("{map:?}"),
        phi_points: phi_grid.len(),
        theta_points: theta_grid.len(),
    })
}

/// The output state reduced to the laboratory modes by tracing out the
/// escaping probe.
pub fn reduced_lab_state(state: &StateVector) -> Result<DensityOperator> {
    if state.space() != &full_space() {
        return Err(Error::DimensionMismatch {
            expected: full_space().total_dim(),
            got: state.space().total_dim(),
        });
    }
    partial_trace(&state.to_density(), &[0, 1])
}

/// Evenly spaced grid of n points over [0, 2π), endpoint excluded.
pub fn angle_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 2.0 * std::f64::consts::PI * i as f64 / n as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, validate_density};
    use std::f64::consts::PI;

    fn canonical() -> InterferometerParams {
        InterferometerParams::real(0.1, 0.1, 0.1, 0.0, 0.0)
    }

    #[test]
    fn vacuum_pump_gives_vacuum_state() {
        let p = InterferometerParams::real(0.0, 0.1, 0.1, 0.3, 0.7);
        let psi = build_output_state(&p).unwrap();
        assert_eq!(psi.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert!(psi.amplitudes().iter().skip(1).all(|z| z.norm() == 0.0));
        assert_eq!(click_probabilities(&psi.to_density()).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn output_state_normalized_for_any_params() {
        for (v, f1, f2, phi, th) in [
            (0.1, 0.1, 0.1, 0.0, 0.0),
            (0.25, 0.05, 0.15, 1.3, 0.9),
            (0.01, 0.2, 0.07, 5.0, 2.4),
        ] {
            let p = InterferometerParams::real(v, f1, f2, phi, th);
            let psi = build_output_state(&p).unwrap();
            assert!((psi.amplitudes().norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn normalization_value_at_canonical_params() {
        assert!((canonical().normalization_sq() - 1.0002).abs() < 1e-15);
    }

    #[test]
    fn unbalanced_rotator_coefficients_rejected() {
        let c = Complex64::new(0.9, 0.0);
        assert!(InterferometerParams::new(
            Complex64::new(0.1, 0.0),
            Complex64::new(0.1, 0.0),
            Complex64::new(0.1, 0.0),
            0.0,
            c,
            c
        )
        .is_err());
    }

    #[test]
    fn regime_warning_flags_large_efficiencies() {
        assert!(canonical().regime_warning().is_none());
        let loud = InterferometerParams::real(1.0, 0.5, 0.1, 0.0, 0.0);
        assert!(loud.regime_warning().is_some());
    }

    #[test]
    fn detector_projectors_structure() {
        let det = detector_projectors();
        assert!((det.p_a.trace().re - 3.0).abs() < 1e-14);
        assert!(((det.p_a.clone() + det.p_b.clone()).trace().re - 6.0).abs() < 1e-14);
        assert!(max_abs(&(&det.p_a * &det.p_a - &det.p_a)) < 1e-14);
        assert!(max_abs(&(&det.p_b * &det.p_b - &det.p_b)) < 1e-14);
        assert!(max_abs(&(det.p_a.adjoint() - &det.p_a)) < 1e-14);
        // Computed fact, recorded here: the two detector vectors are
        // orthogonal, so P_A P_B = 0.
        let inner = alpha_vector().amplitudes().dotc(beta_vector().amplitudes());
        assert!(inner.norm() < 1e-15);
        assert!(max_abs(&(&det.p_a * &det.p_b)) < 1e-14);
    }

    #[test]
    fn click_probabilities_frozen_values() {
        // phi = 0: interference term vanishes, p_A = p_B = |V|²(|f1|²+|f2|²)/(2N²).
        let psi = build_output_state(&canonical()).unwrap();
        let (pa, pb) = click_probabilities(&psi.to_density()).unwrap();
        assert!((pa - 9.99800039992002e-5).abs() < 1e-17);
        assert!((pb - 9.99800039992002e-5).abs() < 1e-17);

        // phi = pi/2: fully constructive at A, dark at B.
        let p = InterferometerParams::real(0.1, 0.1, 0.1, PI / 2.0, 0.0);
        let psi = build_output_state(&p).unwrap();
        let (pa, pb) = click_probabilities(&psi.to_density()).unwrap();
        assert!((pa - 1.999600079984004e-4).abs() < 1e-17);
        assert!(pb.abs() < 1e-17);
    }

    #[test]
    fn closed_form_matches_trace_pipeline_on_grid() {
        let mut worst: f64 = 0.0;
        for &(v, f) in &[(0.05, 0.05), (0.05, 0.1), (0.1, 0.05), (0.1, 0.1)] {
            for phi in angle_grid(16) {
                for theta in angle_grid(16) {
                    let p = InterferometerParams::real(v, f, f, phi, theta);
                    let (ca, cb) = closed_form_probabilities(&p);
                    let psi = build_output_state(&p).unwrap();
                    let (pa, pb) = click_probabilities(&psi.to_density()).unwrap();
                    worst = worst.max((ca - pa).abs()).max((cb - pb).abs());
                }
            }
        }
        assert!(worst < 1e-12, "worst deviation {worst:e}");
    }

    #[test]
    fn closed_form_independent_of_b_phase() {
        // b enters only through |a|² + |b|² = 1.
        let a = Complex64::new(0.6, 0.0);
        let b1 = Complex64::new(0.8, 0.0);
        let b2 = Complex64::from_polar(0.8, 1.1);
        let f = Complex64::new(0.1, 0.0);
        let v = Complex64::new(0.1, 0.0);
        let p1 = InterferometerParams::new(v, f, f, 0.7, a, b1).unwrap();
        let p2 = InterferometerParams::new(v, f, f, 0.7, a, b2).unwrap();
        assert_eq!(closed_form_probabilities(&p1), closed_form_probabilities(&p2));
    }

    #[test]
    fn hm_probabilities_identity_transform_reduces_to_linear_case() {
        let ident = HmMap::new(ComplexMatrix::identity(3, 3)).unwrap();
        for phi in [0.0, 0.9, PI / 2.0] {
            let p = InterferometerParams::real(0.1, 0.1, 0.1, phi, 0.4);
            let (pa, pb) = hm_probabilities(&p, &ident).unwrap();
            let (ca, cb) = closed_form_probabilities(&p);
            assert!((pa - ca).abs() < 1e-15);
            assert!((pb - cb).abs() < 1e-15);
        }
    }

    #[test]
    fn hm_signal_frozen_value() {
        // V = 0.1, f1 = f2 = 0.1, a = 1, b = 0, phi = pi/2:
        // signal = 2|V|² f² / N*² with N*² = 1.0002.
        let p = InterferometerParams::real(0.1, 0.1, 0.1, PI / 2.0, 0.0);
        let map = probe_map_preset();
        let (pa, pb) = hm_probabilities(&p, &map).unwrap();
        assert!((pa - pb - 1.999600079984004e-4).abs() < 1e-16);
        assert!((hm_signal_closed_form(&p) - 1.999600079984004e-4).abs() < 1e-16);
    }

    #[test]
    fn hm_signal_vanishes_for_equal_rotator_coefficients() {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        for phi in angle_grid(16) {
            let p = InterferometerParams::real(0.1, 0.1, 0.1, phi, inv.asin());
            assert!((p.a() - p.b()).norm() < 1e-12);
            assert!(hm_signal_closed_form(&p).abs() < 1e-15);
            let (pa, pb) = hm_probabilities(&p, &probe_map_preset()).unwrap();
            assert!((pa - pb).abs() < 1e-15);
        }
    }

    #[test]
    fn hm_closed_form_matches_pipeline_on_grid() {
        let map = probe_map_preset();
        let mut worst: f64 = 0.0;
        for phi in angle_grid(16) {
            for theta in angle_grid(16) {
                let p = InterferometerParams::real(0.1, 0.1, 0.1, phi, theta);
                let (pa, pb) = hm_probabilities(&p, &map).unwrap();
                worst = worst.max((pa - pb - hm_signal_closed_form(&p)).abs());
            }
        }
        assert!(worst < 1e-12, "worst deviation {worst:e}");
    }

    #[test]
    fn scan_identity_matches_closed_form_surface() {
        let base = canonical();
        let res = scan(
            &base,
            &angle_grid(8),
            &angle_grid(8),
            &QuantumMap::Identity { dim: 3 },
        )
        .unwrap();
        assert_eq!(res.rows.len(), 64);
        for row in &res.rows {
            let p = InterferometerParams::real(0.1, 0.1, 0.1, row.phi, row.theta);
            let (ca, cb) = closed_form_probabilities(&p);
            assert!((row.signal - (ca - cb)).abs() < 1e-14);
            assert!((0.0..=1.0).contains(&row.p_a));
            assert!((0.0..=1.0).contains(&row.p_b));
        }
    }

    #[test]
    fn scan_single_point_grid() {
        let res = scan(
            &canonical(),
            &[0.5],
            &[0.25],
            &QuantumMap::Identity { dim: 3 },
        )
        .unwrap();
        assert_eq!(res.rows.len(), 1);
    }

    #[test]
    fn signal_oscillates_in_phi_with_period_two_pi() {
        // theta = 0 row: signal = (|V|²/N²)·2 Re(i f1* f2 e^{-i phi}) = K sin(phi).
        let k = 2.0 * 0.01 * 0.01 / 1.0002;
        for phi in angle_grid(12) {
            let p = InterferometerParams::real(0.1, 0.1, 0.1, phi, 0.0);
            let (pa, pb) = closed_form_probabilities(&p);
            assert!((pa - pb - k * phi.sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn reduced_lab_state_reproduces_click_probabilities() {
        let p = InterferometerParams::real(0.1, 0.1, 0.1, 0.8, 0.3);
        let psi = build_output_state(&p).unwrap();
        let rho_lab = reduced_lab_state(&psi).unwrap();
        let (pa_full, pb_full) = click_probabilities(&psi.to_density()).unwrap();
        let (p_alpha, p_beta) = lab_projectors();
        let pa = (&p_alpha * rho_lab.matrix()).trace().re;
        let pb = (&p_beta * rho_lab.matrix()).trace().re;
        assert!((pa - pa_full).abs() < 1e-12);
        assert!((pb - pb_full).abs() < 1e-12);
    }

    #[test]
    fn reduced_lab_state_of_vacuum_and_rank() {
        let vac = InterferometerParams::real(0.0, 0.1, 0.1, 0.0, 0.0);
        let rho = reduced_lab_state(&build_output_state(&vac).unwrap()).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 1.0).abs() < 1e-14);

        let p = canonical();
        let rho = reduced_lab_state(&build_output_state(&p).unwrap()).unwrap();
        assert!(validate_density(rho.matrix(), 1e-10).valid);
        // Eigenvalue count: at most 3 nonzero (probe dimension bounds the rank).
        let sym = (rho.matrix() + rho.matrix().adjoint()) * Complex64::new(0.5, 0.0);
        let eigs = sym.symmetric_eigen().eigenvalues;
        let nonzero = eigs.iter().filter(|&&e| e.abs() > 1e-12).count();
        assert!(nonzero <= 3);
    }
}
