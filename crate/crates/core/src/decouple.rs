//! Dynamical decoupling: gauge unitaries from Euler angles, discretized
//! SU(2) group averaging, drive schedules and stroboscopic evolution.
//!
//! A gauge rotation `exp(-i theta G_a(x))` factorizes into commuting
//! exponentials on the affected tensor factors (the two adjacent links and
//! the site-x fermion modes), so it is assembled from dense 5x5 / 2x2 blocks
//! and stays sparse on the composite space.
//!
//! Group averaging over a product grid factorizes into three nested
//! single-angle averages (the alpha, beta and gamma sums commute as linear
//! maps), which turns the `N^3`-term sum per vertex into `3N` conjugations.
//! The result equals the flat per-point sum up to floating-point reordering;
//! the drive-schedule time average keeps the literal per-point form.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dense;
use crate::error::{Error, Result};
use crate::hilbert::{CompositeBasis, FermionBasis, LinkBasis, Spin, LINK_DIM};
use crate::ops;
use crate::sparse::SparseOperator;

use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// ---------------------------------------------------------------------------
// Euler angles and grids
// ---------------------------------------------------------------------------

/// Euler angles of an SU(2) element, `alpha in [0, 2pi)`, `beta in [0, pi]`,
/// `gamma in [0, 4pi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let ok = (0.0..2.0 * PI).contains(&alpha)
            && (0.0..=PI).contains(&beta)
            && (0.0..4.0 * PI).contains(&gamma);
        if ok {
            Ok(Self { alpha, beta, gamma })
        } else {
            Err(Error::AnglesOutOfRange { alpha, beta, gamma })
        }
    }

    pub fn identity() -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
            gamma: 0.0,
        }
    }
}

/// Discretization of the Euler-angle cube.
///
/// `CubeUniform` reads the cube literally: midpoints in `beta` itself.
/// `HaarExact` places the grid uniformly in `cos beta`, which makes the
/// equal-weight sum an exact Riemann sampling of the SU(2) Haar measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridScheme {
    CubeUniform,
    HaarExact,
}

impl GridScheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            GridScheme::CubeUniform => "cube",
            GridScheme::HaarExact => "haar",
        }
    }
}

/// Row-major product grid over the discretized SU(2) manifold with uniform
/// weights `1/N^3`. Alpha and gamma use left-endpoint spacing
/// (`alpha_l = 2 pi l / N`, `gamma_l = 4 pi l / N`); beta uses midpoints.
#[derive(Clone, Debug)]
pub struct EulerGrid {
    n: usize,
    scheme: GridScheme,
    alphas: Vec<f64>,
    betas: Vec<f64>,
    gammas: Vec<f64>,
}

impl EulerGrid {
    pub fn new(n: usize, scheme: GridScheme) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGrid);
        }
        let nf = n as f64;
        let alphas = (0..n).map(|l| 2.0 * PI * l as f64 / nf).collect();
        let gammas = (0..n).map(|l| 4.0 * PI * l as f64 / nf).collect();
        let betas = (0..n)
            .map(|l| match scheme {
                GridScheme::CubeUniform => PI * (l as f64 + 0.5) / nf,
                GridScheme::HaarExact => (-1.0 + (2.0 * l as f64 + 1.0) / nf).acos(),
            })
            .collect();
        Ok(Self {
            n,
            scheme,
            alphas,
            betas,
            gammas,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scheme(&self) -> GridScheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.len() as f64
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    /// Grid point for the linear index `nu` in row-major `mu` order.
    pub fn point(&self, nu: usize) -> Result<EulerAngles> {
        if nu >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: nu,
                dim: self.len(),
            });
        }
        let mu1 = nu / (self.n * self.n);
        let mu2 = (nu / self.n) % self.n;
        let mu3 = nu % self.n;
        EulerAngles::new(self.alphas[mu1], self.betas[mu2], self.gammas[mu3])
    }

    /// All points with their weights, ordered by the linear index.
    pub fn points(&self) -> Vec<(EulerAngles, f64)> {
        (0..self.len())
            .map(|nu| (self.point(nu).expect("in range"), self.weight()))
            .collect()
    }
}

/// Row-major linearization `nu = mu1 N^2 + mu2 N + mu3`.
pub fn multi_to_linear(mu: [usize; 3], n: usize) -> Result<usize> {
    if mu.iter().any(|&m| m >= n) {
        return Err(Error::MultiIndexOutOfRange { mu, n });
    }
    Ok(mu[0] * n * n + mu[1] * n + mu[2])
}

// ---------------------------------------------------------------------------
// Vertex assignments
// ---------------------------------------------------------------------------

/// Assignment of one grid element per site; `None` leaves a site undriven.
#[derive(Clone, Debug)]
pub struct VertexAssignment {
    elements: Vec<Option<usize>>,
}

impl VertexAssignment {
    /// Independent element per vertex.
    pub fn per_vertex(elements: Vec<usize>) -> Self {
        Self {
            elements: elements.into_iter().map(Some).collect(),
        }
    }

    /// Two shared elements: `even` on even sites, `odd` on odd sites.
    pub fn staggered(n_sites: usize, even: usize, odd: usize) -> Self {
        Self {
            elements: (0..n_sites)
                .map(|x| Some(if x % 2 == 0 { even } else { odd }))
                .collect(),
        }
    }

    /// A single driven site, everything else idle.
    pub fn single_site(n_sites: usize, site: usize, element: usize) -> Self {
        Self {
            elements: (0..n_sites)
                .map(|x| if x == site { Some(element) } else { None })
                .collect(),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, site: usize) -> Option<usize> {
        self.elements.get(site).copied().flatten()
    }
}

/// How a lattice average distributes group elements over vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AverageMode {
    PerVertex,
    Staggered,
}

impl AverageMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            AverageMode::PerVertex => "per-vertex",
            AverageMode::Staggered => "staggered",
        }
    }
}

// ---------------------------------------------------------------------------
// Gauge unitaries
// ---------------------------------------------------------------------------

/// 2x2 rotation acting on the singly-occupied subspace of a site:
/// `exp(i theta sigma_a / 2)` (the sign matches `exp(-i theta (-Q_a))`).
fn fermion_rotation_block(a: usize, theta: f64) -> Result<DMatrix<Complex64>> {
    let sigma = ops::PauliSet::sigma_2x2(a)?;
    let mut gen = DMatrix::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            gen[(i, j)] = c(0.0, theta / 2.0) * sigma[i][j];
        }
    }
    Ok(dense::expm(&gen))
}

/// Embed the single-site fermion rotation into the fixed-number basis.
/// Sites with zero or double occupancy are untouched; singly occupied
/// sites mix up/down with no Jordan-Wigner sign (the two modes are
/// adjacent in the global order).
fn fermion_rotation(basis: &FermionBasis, x: usize, u: &DMatrix<Complex64>) -> SparseOperator {
    let up = FermionBasis::mode_index(x, Spin::Up);
    let down = FermionBasis::mode_index(x, Spin::Down);
    let mut triplets = Vec::new();
    for (k, &s) in basis.states().iter().enumerate() {
        let occ_up = FermionBasis::occupied(s, up);
        let occ_down = FermionBasis::occupied(s, down);
        match (occ_up, occ_down) {
            (true, true) | (false, false) => triplets.push((k, k, c(1.0, 0.0))),
            (true, false) => {
                let flipped = basis
                    .index_of(s & !(1 << up) | (1 << down))
                    .expect("partner state in sector");
                push_nonzero(&mut triplets, k, k, u[(0, 0)]);
                push_nonzero(&mut triplets, flipped, k, u[(1, 0)]);
            }
            (false, true) => {
                let flipped = basis
                    .index_of(s & !(1 << down) | (1 << up))
                    .expect("partner state in sector");
                push_nonzero(&mut triplets, flipped, k, u[(0, 1)]);
                push_nonzero(&mut triplets, k, k, u[(1, 1)]);
            }
        }
    }
    SparseOperator::from_triplets(basis.dim(), triplets, false).expect("indices in range")
}

fn push_nonzero(
    triplets: &mut Vec<(usize, usize, Complex64)>,
    r: usize,
    col: usize,
    v: Complex64,
) {
    if v.re != 0.0 || v.im != 0.0 {
        triplets.push((r, col, v));
    }
}

fn link_exponential(
    basis: &LinkBasis,
    link: usize,
    block: &ops::LinkBlock,
    factor: Complex64,
) -> Result<SparseOperator> {
    let mut gen = DMatrix::zeros(LINK_DIM, LINK_DIM);
    for i in 0..LINK_DIM {
        for j in 0..LINK_DIM {
            gen[(i, j)] = factor * block[i][j];
        }
    }
    let exp = dense::expm(&gen);
    let mut out = ops::zero_block();
    for i in 0..LINK_DIM {
        for j in 0..LINK_DIM {
            out[i][j] = exp[(i, j)];
        }
    }
    ops::embed_link_block(basis, link, &out)
}

/// One-parameter gauge rotation `exp(-i theta G_a(x))`, assembled as the
/// product of commuting factor exponentials.
pub fn gauge_rotation(
    basis: &CompositeBasis,
    x: usize,
    a: usize,
    theta: f64,
) -> Result<SparseOperator> {
    let cfg = *basis.cfg();
    cfg.check_site(x)?;
    let fermion_dim = basis.fermion().dim();

    // exp(+i theta Q_a(x)) on the fermion factor
    let block = fermion_rotation_block(a, theta)?;
    let mut v = fermion_rotation(basis.fermion(), x, &block)
        .kron(&SparseOperator::identity(basis.link().dim()));

    // exp(-i theta L_a) on the right link, exp(+i theta R_a) on the left
    if let Some(link) = cfg.right_link_of(x)? {
        let l =
            link_exponential(basis.link(), link, &ops::left_field_block(a)?, c(0.0, -theta))?;
        v = v.matmul(&SparseOperator::identity(fermion_dim).kron(&l))?;
    }
    if let Some(link) = cfg.left_link_of(x)? {
        let r =
            link_exponential(basis.link(), link, &ops::right_field_block(a)?, c(0.0, theta))?;
        v = v.matmul(&SparseOperator::identity(fermion_dim).kron(&r))?;
    }
    Ok(v)
}

/// Local SU(2) gauge transformation
/// `V_x(g) = exp(-i alpha G_3) exp(-i beta G_2) exp(-i gamma G_3)`.
pub fn gauge_unitary(basis: &CompositeBasis, x: usize, g: &EulerAngles) -> Result<SparseOperator> {
    let va = gauge_rotation(basis, x, 3, g.alpha)?;
    let vb = gauge_rotation(basis, x, 2, g.beta)?;
    let vc = gauge_rotation(basis, x, 3, g.gamma)?;
    va.matmul(&vb)?.matmul(&vc)
}

/// Product `prod_x V_x(g_x)` over the assigned sites. Generators at
/// different sites commute, so the site order only reshuffles roundoff.
pub fn lattice_unitary(
    basis: &CompositeBasis,
    assignment: &VertexAssignment,
    grid: &EulerGrid,
) -> Result<SparseOperator> {
    if assignment.n_sites() != basis.cfg().n_sites() {
        return Err(Error::MissingSite(assignment.n_sites()));
    }
    let mut v = SparseOperator::identity(basis.dim());
    for x in 0..assignment.n_sites() {
        if let Some(element) = assignment.element(x) {
            let g = grid.point(element)?;
            v = v.matmul(&gauge_unitary(basis, x, &g)?)?;
        }
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// Group averaging
// ---------------------------------------------------------------------------

/// Weighted sums of conjugations preserve hermiticity; carry the flag of
/// the averaged operator onto the accumulator.
fn carry_hermitian(acc: SparseOperator, source: &SparseOperator) -> Result<SparseOperator> {
    if source.hermitian_flag() {
        acc.flag_hermitian()
    } else {
        Ok(acc)
    }
}

/// Average `U^dag O U` over one Euler axis at a single vertex.
fn axis_average(
    basis: &CompositeBasis,
    op: &SparseOperator,
    x: usize,
    a: usize,
    angles: &[f64],
) -> Result<SparseOperator> {
    let weight = 1.0 / angles.len() as f64;
    let mut acc = SparseOperator::zero(op.dim());
    for &theta in angles {
        let u = gauge_rotation(basis, x, a, theta)?;
        acc = acc.add_scaled(c(weight, 0.0), &op.conjugated_by(&u)?)?;
    }
    carry_hermitian(acc, op)
}

/// Discretized single-vertex group average
/// `Pi_x(O) = sum_mu w_mu V_x(g_mu)^dag O V_x(g_mu)`,
/// evaluated as three nested single-angle averages over the product grid.
pub fn group_average_vertex(
    basis: &CompositeBasis,
    op: &SparseOperator,
    x: usize,
    grid: &EulerGrid,
) -> Result<SparseOperator> {
    if op.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            left: op.dim(),
            right: basis.dim(),
        });
    }
    basis.cfg().check_site(x)?;
    // innermost conjugation is the alpha rotation, outermost the gamma one
    let o1 = axis_average(basis, op, x, 3, grid.alphas())?;
    let o2 = axis_average(basis, &o1, x, 2, grid.betas())?;
    axis_average(basis, &o2, x, 3, grid.gammas())
}

/// Lattice-wide group average.
///
/// `PerVertex` applies the single-vertex average sequentially on every site
/// (averaging channels at distinct sites commute), `N_L * 3N` conjugations.
/// `Staggered` is the literal double sum over one shared element on even and
/// one on odd sites, `N^6` conjugations; for Hamiltonians whose terms couple
/// at most one even and one odd site the two modes agree.
pub fn group_average_lattice(
    basis: &CompositeBasis,
    op: &SparseOperator,
    grid: &EulerGrid,
    mode: AverageMode,
) -> Result<SparseOperator> {
    if op.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            left: op.dim(),
            right: basis.dim(),
        });
    }
    match mode {
        AverageMode::PerVertex => {
            let mut acc = op.clone();
            for x in 0..basis.cfg().n_sites() {
                acc = group_average_vertex(basis, &acc, x, grid)?;
            }
            Ok(acc)
        }
        AverageMode::Staggered => {
            let n_sites = basis.cfg().n_sites();
            let weight = 1.0 / (grid.len() * grid.len()) as f64;
            let mut acc = SparseOperator::zero(op.dim());
            for even in 0..grid.len() {
                for odd in 0..grid.len() {
                    let v = lattice_unitary(
                        basis,
                        &VertexAssignment::staggered(n_sites, even, odd),
                        grid,
                    )?;
                    acc = acc.add_scaled(c(weight, 0.0), &op.conjugated_by(&v)?)?;
                }
            }
            carry_hermitian(acc, op)
        }
    }
}

// ---------------------------------------------------------------------------
// Drive schedules
// ---------------------------------------------------------------------------

/// What the periodic drive addresses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScheduleMode {
    /// Drive a single vertex through all `N^3` grid elements.
    SingleVertex { site: usize },
    /// Drive even and odd sublattices through all `N^6` element pairs.
    Staggered,
}

/// Piecewise-constant drive: step `nu` applies the lattice unitary of the
/// `nu`-th assignment for a time `dt = T / n_steps`.
#[derive(Clone, Debug)]
pub struct DriveSchedule {
    period: f64,
    grid: EulerGrid,
    steps: Vec<VertexAssignment>,
}

/// `build_schedule`: enumerate drive steps in row-major grid order.
pub fn build_schedule(
    grid: &EulerGrid,
    mode: ScheduleMode,
    n_sites: usize,
    period: f64,
) -> Result<DriveSchedule> {
    if period <= 0.0 {
        return Err(Error::InvalidPeriod(period));
    }
    // Eq-of-motion reading of the time average needs equal time slices,
    // which is exactly the uniform-weight property of the grids.
    let w = grid.weight();
    if (w * grid.len() as f64 - 1.0).abs() > 1e-12 {
        return Err(Error::NonUniformWeights);
    }
    let steps: Vec<VertexAssignment> = match mode {
        ScheduleMode::SingleVertex { site } => {
            if site >= n_sites {
                return Err(Error::InvalidSite {
                    site,
                    n_sites,
                });
            }
            (0..grid.len())
                .map(|nu| VertexAssignment::single_site(n_sites, site, nu))
                .collect()
        }
        ScheduleMode::Staggered => {
            let mut steps = Vec::with_capacity(grid.len() * grid.len());
            for even in 0..grid.len() {
                for odd in 0..grid.len() {
                    steps.push(VertexAssignment::staggered(n_sites, even, odd));
                }
            }
            steps
        }
    };
    Ok(DriveSchedule {
        period,
        grid: grid.clone(),
        steps,
    })
}

impl DriveSchedule {
    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn n_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn dt(&self) -> f64 {
        self.period / self.steps.len() as f64
    }

    pub fn grid(&self) -> &EulerGrid {
        &self.grid
    }

    pub fn assignment(&self, nu: usize) -> Result<&VertexAssignment> {
        self.steps.get(nu).ok_or(Error::IndexOutOfRange {
            index: nu,
            dim: self.steps.len(),
        })
    }

    /// Materialize the lattice unitary of step `nu`.
    pub fn unitary(&self, basis: &CompositeBasis, nu: usize) -> Result<SparseOperator> {
        lattice_unitary(basis, self.assignment(nu)?, &self.grid)
    }

    /// Rescale the period, keeping the step sequence.
    pub fn with_period(&self, period: f64) -> Result<Self> {
        if period <= 0.0 {
            return Err(Error::InvalidPeriod(period));
        }
        Ok(Self {
            period,
            grid: self.grid.clone(),
            steps: self.steps.clone(),
        })
    }
}

/// First-order effective Hamiltonian of the driven system: the literal time
/// average `(1/n) sum_nu U_nu^dag H0 U_nu` over the schedule steps.
pub fn effective_hamiltonian(
    basis: &CompositeBasis,
    h0: &SparseOperator,
    schedule: &DriveSchedule,
) -> Result<SparseOperator> {
    if h0.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            left: h0.dim(),
            right: basis.dim(),
        });
    }
    let weight = 1.0 / schedule.n_steps() as f64;
    let mut acc = SparseOperator::zero(h0.dim());
    for nu in 0..schedule.n_steps() {
        let u = schedule.unitary(basis, nu)?;
        acc = acc.add_scaled(c(weight, 0.0), &h0.conjugated_by(&u)?)?;
    }
    carry_hermitian(acc, h0)
}

/// Default dimension cap for dense one-period propagators.
pub const DENSE_PROPAGATOR_THRESHOLD: usize = 1024;

/// Exact one-period propagator of the driven system,
/// `U(T) = prod_nu exp(-i V_nu^dag H0 V_nu dt)` with later steps leftmost.
pub fn stroboscopic_propagator(
    basis: &CompositeBasis,
    h0: &SparseOperator,
    schedule: &DriveSchedule,
    threshold: usize,
) -> Result<DMatrix<Complex64>> {
    if h0.dim() > threshold {
        return Err(Error::AboveDenseThreshold {
            dim: h0.dim(),
            threshold,
        });
    }
    if h0.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            left: h0.dim(),
            right: basis.dim(),
        });
    }
    let dt = schedule.dt();
    let mut u = DMatrix::<Complex64>::identity(h0.dim(), h0.dim());
    for nu in 0..schedule.n_steps() {
        let v = schedule.unitary(basis, nu)?;
        let h_nu = h0.conjugated_by(&v)?.to_dense();
        u = dense::exp_i_hermitian(&h_nu, dt) * u;
    }
    Ok(u)
}

/// Expectation-value time series of a stroboscopically driven state.
#[derive(Clone, Debug)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub names: Vec<String>,
    /// `values[k][o]` is observable `o` at `times[k]`.
    pub values: Vec<Vec<f64>>,
}

/// Evolve `psi0` period by period under the stroboscopic propagator and
/// record the real expectation values of the observables at each multiple
/// of the period (including t = 0).
pub fn evolve_and_measure(
    basis: &CompositeBasis,
    psi0: &[Complex64],
    h0: &SparseOperator,
    schedule: &DriveSchedule,
    n_periods: usize,
    observables: &[(&str, &SparseOperator)],
) -> Result<TimeSeries> {
    let norm: f64 = psi0.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized((norm - 1.0).abs()));
    }
    let u = stroboscopic_propagator(basis, h0, schedule, DENSE_PROPAGATOR_THRESHOLD)?;
    let mut psi = nalgebra::DVector::from_column_slice(psi0);
    let mut series = TimeSeries {
        times: Vec::with_capacity(n_periods + 1),
        names: observables.iter().map(|(n, _)| n.to_string()).collect(),
        values: Vec::with_capacity(n_periods + 1),
    };
    for k in 0..=n_periods {
        series.times.push(k as f64 * schedule.period());
        let row: Result<Vec<f64>> = observables
            .iter()
            .map(|(_, op)| op.expectation(psi.as_slice()))
            .collect();
        series.values.push(row?);
        if k < n_periods {
            psi = &u * psi;
        }
    }
    Ok(series)
}

/// Undriven counterpart of [`evolve_and_measure`]: evolve under
/// `exp(-i H0 T)` per period and record the same observables.
pub fn evolve_undriven(
    psi0: &[Complex64],
    h0: &SparseOperator,
    period: f64,
    n_periods: usize,
    observables: &[(&str, &SparseOperator)],
) -> Result<TimeSeries> {
    let norm: f64 = psi0.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized((norm - 1.0).abs()));
    }
    let u = dense::exp_i_hermitian(&h0.to_dense(), period);
    let mut psi = nalgebra::DVector::from_column_slice(psi0);
    let mut series = TimeSeries {
        times: Vec::with_capacity(n_periods + 1),
        names: observables.iter().map(|(n, _)| n.to_string()).collect(),
        values: Vec::with_capacity(n_periods + 1),
    };
    for k in 0..=n_periods {
        series.times.push(k as f64 * period);
        let row: Result<Vec<f64>> = observables
            .iter()
            .map(|(_, op)| op.expectation(psi.as_slice()))
            .collect();
        series.values.push(row?);
        if k < n_periods {
            psi = &u * psi;
        }
    }
    Ok(series)
}
