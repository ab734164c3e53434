//! Quantum maps: linear Kraus channels, local lifts to tensor factors,
//! the nonlinear final-state-projection map, and local product maps.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    max_abs, ComplexMatrix, ComplexVector, DensityOperator, SpaceStructure, StateVector,
};

/// Entrywise tolerance on the Kraus completeness relation Σ E†E = I.
pub const TOL_KRAUS: f64 = 1e-10;
/// |det T| below this is treated as singular.
pub const TOL_SINGULAR: f64 = 1e-12;
/// Renormalization denominators below this are degenerate.
pub const TOL_DENOM: f64 = 1e-12;

/// A completely positive, trace-preserving channel ρ ↦ Σ_j E_j ρ E_j†.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    dim: usize,
    operators: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Validates shape and the completeness relation Σ E†E = I.
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::InvalidArgument(
                "a channel needs at least one Kraus operator".into(),
            ));
        }
        let dim = operators[0].nrows();
        for op in &operators {
            if op.nrows() != dim || op.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: op.nrows().max(op.ncols()),
                });
            }
        }
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for op in &operators {
            sum += op.adjoint() * op;
        }
        let dev = max_abs(&(&sum - ComplexMatrix::identity(dim, dim)));
        if dev > TOL_KRAUS {
            return Err(Error::InvalidChannel(dev));
        }
        Ok(Self { dim, operators })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            operators: vec![ComplexMatrix::identity(dim, dim)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }
}

/// Returns Σ_j E_j ρ E_j†.
pub fn apply_kraus(ch: &KrausChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    let d = rho.space().total_dim();
    if d != ch.dim {
        return Err(Error::DimensionMismatch {
            expected: ch.dim,
            got: d,
        });
    }
    let mut out = ComplexMatrix::zeros(d, d);
    for op in &ch.operators {
        out += op * rho.matrix() * op.adjoint();
    }
    Ok(DensityOperator::new_unchecked(rho.space().clone(), out))
}

/// The nonlinear map ρ ↦ (I ⊗ 𝒯)(ρ) / Tr[(I ⊗ 𝒯)(ρ)] with
/// 𝒯: ρ ↦ T ρ T† for a fixed nonsingular T. Probability preserving but
/// nonlinear because of the state-dependent renormalization.
#[derive(Clone, Debug)]
pub struct HmMap {
    dim: usize,
    t: ComplexMatrix,
}

impl HmMap {
    pub fn new(t: ComplexMatrix) -> Result<Self> {
        if !t.is_square() {
            return Err(Error::InvalidArgument("T must be square".into()));
        }
        let det = t.clone().determinant().norm();
        if det <= TOL_SINGULAR {
            return Err(Error::SingularMap(det));
        }
        Ok(Self { dim: t.nrows(), t })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn transform(&self) -> &ComplexMatrix {
        &self.t
    }

    /// Applies T ρ T† / Tr[T ρ T†] on a state of matching total dimension.
    pub fn apply_full(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let d = rho.space().total_dim();
        if d != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: d,
            });
        }
        let raw = &self.t * rho.matrix() * self.t.adjoint();
        let tr = raw.trace().re;
        if tr.abs() < TOL_DENOM {
            return Err(Error::DegenerateState(tr.abs()));
        }
        Ok(DensityOperator::new_unchecked(
            rho.space().clone(),
            raw * Complex64::new(1.0 / tr, 0.0),
        ))
    }
}

/// Lifts T onto the target factor and applies the renormalized conjugation
/// to the full state.
pub fn apply_hm(
    map: &HmMap,
    rho: &DensityOperator,
    target_factor: usize,
) -> Result<DensityOperator> {
    let lifted = lift_operator(&map.t, rho.space(), target_factor, target_factor)?;
    HmMap::new(lifted)?.apply_full(rho)
}

type StateFn = Arc<dyn Fn(&DensityOperator) -> Result<DensityOperator> + Send + Sync>;

/// A tagged alternative over the map families the crate works with.
/// The `General` variant carries a user-declared dimension and an opaque
/// state-to-state function; probability preservation is spot-checked by
/// callers, not proven.
#[derive(Clone)]
pub enum QuantumMap {
    Identity { dim: usize },
    Kraus(KrausChannel),
    Hm(HmMap),
    General { dim: usize, apply: StateFn },
}

impl fmt::Debug for QuantumMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity { dim } => write!(f, "QuantumMap::Identity(dim={dim})"),
            Self::Kraus(ch) => write!(
                f,
                "QuantumMap::Kraus(dim={}, {} operators)",
                ch.dim(),
                ch.operators().len()
            ),
            Self::Hm(m) => write!(f, "QuantumMap::Hm(dim={})", m.dim()),
            Self::General { dim, .. } => write!(f, "QuantumMap::General(dim={dim})"),
        }
    }
}

impl QuantumMap {
    pub fn general<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&DensityOperator) -> Result<DensityOperator> + Send + Sync + 'static,
    {
        Self::General {
            dim,
            apply: Arc::new(f),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Identity { dim } => *dim,
            Self::Kraus(ch) => ch.dim(),
            Self::Hm(m) => m.dim(),
            Self::General { dim, .. } => *dim,
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Self::Identity { .. })
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let d = rho.space().total_dim();
        if d != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: d,
            });
        }
        match self {
            Self::Identity { .. } => Ok(rho.clone()),
            Self::Kraus(ch) => apply_kraus(ch, rho),
            Self::Hm(m) => m.apply_full(rho),
            Self::General { apply, .. } => apply(rho),
        }
    }
}

/// Embeds an operator acting on the contiguous factor range
/// [first..=last] into the full space: I_before ⊗ op ⊗ I_after.
pub fn lift_operator(
    op: &ComplexMatrix,
    space: &SpaceStructure,
    first: usize,
    last: usize,
) -> Result<ComplexMatrix> {
    let n = space.num_factors();
    if first > last || last >= n {
        return Err(Error::InvalidArgument(format!(
            "factor range {first}..={last} out of bounds for {n} factors"
        )));
    }
    let dims = space.factor_dims();
    let target: usize = dims[first..=last].iter().product();
    if op.nrows() != target || op.ncols() != target {
        return Err(Error::DimensionMismatch {
            expected: target,
            got: op.nrows(),
        });
    }
    let before: usize = dims[..first].iter().product();
    let after: usize = dims[last + 1..].iter().product();
    let mut out = ComplexMatrix::identity(before, before).kronecker(op);
    if after > 1 {
        out = out.kronecker(&ComplexMatrix::identity(after, after));
    }
    Ok(out)
}

/// Lifts a single-subsystem map to the full space as I_rest ⊗ ℰ_target.
/// Kraus channels lift by tensoring each operator with identities; the
/// nonlinear map lifts through its defining operator T. Black-box maps
/// carry no structure to lift through and are rejected.
pub fn lift_local(
    map: &QuantumMap,
    space: &SpaceStructure,
    target_factor: usize,
) -> Result<QuantumMap> {
    lift_local_range(map, space, target_factor, target_factor)
}

/// Same as [`lift_local`] over a contiguous factor range.
pub fn lift_local_range(
    map: &QuantumMap,
    space: &SpaceStructure,
    first: usize,
    last: usize,
) -> Result<QuantumMap> {
    let target: usize = space.factor_dims()[first..=last].iter().product();
    if map.dim() != target {
        return Err(Error::DimensionMismatch {
            expected: target,
            got: map.dim(),
        });
    }
    match map {
        QuantumMap::Identity { .. } => Ok(QuantumMap::Identity {
            dim: space.total_dim(),
        }),
        QuantumMap::Kraus(ch) => {
            let ops = ch
                .operators()
                .iter()
                .map(|op| lift_operator(op, space, first, last))
                .collect::<Result<Vec<_>>>()?;
            Ok(QuantumMap::Kraus(KrausChannel::new(ops)?))
        }
        QuantumMap::Hm(m) => {
            let t = lift_operator(m.transform(), space, first, last)?;
            Ok(QuantumMap::Hm(HmMap::new(t)?))
        }
        QuantumMap::General { .. } => Err(Error::InvalidArgument(
            "black-box maps carry no structure to lift through; supply a full-space map".into(),
        )),
    }
}

/// A bipartition of a space's factors into a leading A block and a
/// trailing B block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    a_factors: Vec<usize>,
    b_factors: Vec<usize>,
}

impl Split {
    /// A-side is factors 0..boundary, B-side the rest. Both sides must be
    /// nonempty; only contiguous prefix/suffix partitions are supported.
    pub fn at(space: &SpaceStructure, boundary: usize) -> Result<Self> {
        let n = space.num_factors();
        if boundary == 0 || boundary >= n {
            return Err(Error::InvalidArgument(format!(
                "split boundary {boundary} must leave both sides of {n} factors nonempty"
            )));
        }
        Ok(Self {
            a_factors: (0..boundary).collect(),
            b_factors: (boundary..n).collect(),
        })
    }

    pub fn a_factors(&self) -> &[usize] {
        &self.a_factors
    }

    pub fn b_factors(&self) -> &[usize] {
        &self.b_factors
    }

    pub fn boundary(&self) -> usize {
        self.a_factors.len()
    }
}

/// A bipartite map with declared local components, applied as
/// (lifted ℰ_A) followed by (lifted ℰ_B). On product inputs the output is
/// the tensor of the component outputs.
#[derive(Clone, Debug)]
pub struct LocalProductMap {
    component_a: QuantumMap,
    component_b: QuantumMap,
    space: SpaceStructure,
    split: Split,
}

impl LocalProductMap {
    pub fn new(
        component_a: QuantumMap,
        component_b: QuantumMap,
        space: SpaceStructure,
        split: Split,
    ) -> Result<Self> {
        let da = space.sub_dim(split.a_factors());
        let db = space.sub_dim(split.b_factors());
        if component_a.dim() != da {
            return Err(Error::DimensionMismatch {
                expected: da,
                got: component_a.dim(),
            });
        }
        if component_b.dim() != db {
            return Err(Error::DimensionMismatch {
                expected: db,
                got: component_b.dim(),
            });
        }
        Ok(Self {
            component_a,
            component_b,
            space,
            split,
        })
    }

    pub fn component_a(&self) -> &QuantumMap {
        &self.component_a
    }

    pub fn component_b(&self) -> &QuantumMap {
        &self.component_b
    }

    pub fn space(&self) -> &SpaceStructure {
        &self.space
    }

    pub fn split(&self) -> &Split {
        &self.split
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let k = self.split.boundary();
        let n = self.space.num_factors();
        let lifted_a = lift_local_range(&self.component_a, &self.space, 0, k - 1)?;
        let lifted_b = lift_local_range(&self.component_b, &self.space, k, n - 1)?;
        lifted_b.apply(&lifted_a.apply(rho)?)
    }

    /// Packages the composite action as a full-space map.
    pub fn to_full_map(&self) -> Result<QuantumMap> {
        let this = self.clone();
        // Fail early if a component cannot be lifted.
        let k = self.split.boundary();
        let n = self.space.num_factors();
        lift_local_range(&self.component_a, &self.space, 0, k - 1)?;
        lift_local_range(&self.component_b, &self.space, k, n - 1)?;
        Ok(QuantumMap::general(self.space.total_dim(), move |rho| {
            this.apply(rho)
        }))
    }
}

/// Verdict of a randomized linearity probe.
#[derive(Clone, Debug)]
pub struct LinearityVerdict {
    pub linear: bool,
    /// Worst-case entrywise deviation ‖ℰ(λρ+(1−λ)σ) − λℰ(ρ) − (1−λ)ℰ(σ)‖_max.
    pub max_deviation: f64,
    pub samples: usize,
    pub tol: f64,
}

/// Draws random state pairs and mixing weights and measures how far the
/// map is from acting affinely on them.
pub fn linearity_probe(
    map: &QuantumMap,
    dim: usize,
    samples: usize,
    tol: f64,
    rng: &mut ChaCha8Rng,
) -> Result<LinearityVerdict> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    if map.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: map.dim(),
        });
    }
    let space = SpaceStructure::new(vec![dim])?;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let rho = random_density(space.clone(), rng);
        let sigma = random_density(space.clone(), rng);
        let lambda = rng.gen_range(0.05..0.95);
        let mix = DensityOperator::new_unchecked(
            space.clone(),
            rho.matrix() * Complex64::new(lambda, 0.0)
                + sigma.matrix() * Complex64::new(1.0 - lambda, 0.0),
        );
        let lhs = map.apply(&mix)?;
        let rhs = map.apply(&rho)?.matrix() * Complex64::new(lambda, 0.0)
            + map.apply(&sigma)?.matrix() * Complex64::new(1.0 - lambda, 0.0);
        worst = worst.max(max_abs(&(lhs.matrix() - rhs)));
    }
    Ok(LinearityVerdict {
        linear: worst < tol,
        max_deviation: worst,
        samples,
        tol,
    })
}

/// Deterministic sub-stream for sample `index` of a master seed, so batches
/// can be evaluated in any order with identical results.
pub fn sub_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(master_seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn gaussian_complex(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    use rand_distr::StandardNormal;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Hilbert–Schmidt random density operator ρ = GG†/Tr(GG†); full rank
/// almost surely.
pub fn random_density(space: SpaceStructure, rng: &mut ChaCha8Rng) -> DensityOperator {
    let d = space.total_dim();
    let g = gaussian_complex(d, d, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityOperator::new_unchecked(space, m * Complex64::new(1.0 / tr, 0.0))
}

/// Haar-random pure state.
pub fn random_pure(space: SpaceStructure, rng: &mut ChaCha8Rng) -> StateVector {
    let d = space.total_dim();
    let mut v = ComplexVector::from_fn(d, |_, _| {
        use rand_distr::StandardNormal;
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    v /= Complex64::new(v.norm(), 0.0);
    StateVector::new(space, v).expect("normalized by construction")
}

/// Random CPTP channel with 1..=dim² Kraus operators, read off a
/// Haar-random isometry built by QR of a Gaussian complex matrix. The
/// completeness relation holds by construction.
pub fn random_kraus_channel(dim: usize, rng: &mut ChaCha8Rng) -> KrausChannel {
    let k = rng.gen_range(1..=dim * dim);
    let g = gaussian_complex(dim * k, dim, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // Fix the phase ambiguity so the isometry is Haar distributed.
    for j in 0..dim {
        let phase = r[(j, j)] / Complex64::new(r[(j, j)].norm(), 0.0);
        for i in 0..dim * k {
            q[(i, j)] *= phase;
        }
    }
    let ops = (0..k)
        .map(|j| q.rows(j * dim, dim).into_owned())
        .collect();
    KrausChannel::new(ops).expect("isometry blocks satisfy completeness")
}
