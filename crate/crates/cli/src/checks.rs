//! The operator-algebra and gauge-invariance check suite behind `su2dd check`.
//!
//! Every check reports its name, the worst residual and the tolerance it was
//! held to; the command exits nonzero if any check fails.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use su2dd_core::decouple::{
    build_schedule, effective_hamiltonian, gauge_unitary, group_average_lattice,
    group_average_vertex, AverageMode, EulerAngles, EulerGrid, GridScheme, ScheduleMode,
};
use su2dd_core::hilbert::{CompositeBasis, LINK_DIM};
use su2dd_core::model;
use su2dd_core::ops::{self, LinkBlock};
use su2dd_core::sparse::{commutator_max_norm, SparseOperator};
use su2dd_core::spectra::Perturbation;

use crate::config::ExperimentConfig;
use crate::CliError;

const ALGEBRA_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.residual < self.tolerance
    }
}

fn block_to_sparse(b: &LinkBlock) -> SparseOperator {
    let mut t = Vec::new();
    for (i, row) in b.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v.re != 0.0 || v.im != 0.0 {
                t.push((i, j, v));
            }
        }
    }
    SparseOperator::from_triplets(LINK_DIM, t, false).expect("5x5 block")
}

const EPSILON_CYCLES: [(usize, usize, usize); 3] = [(1, 2, 3), (2, 3, 1), (3, 1, 2)];

/// Link-field commutator checks on the raw 5x5 blocks. Parameterized over
/// the blocks so corrupted conventions can be injected by tests.
pub fn link_algebra_checks(
    left: &dyn Fn(usize) -> LinkBlock,
    right: &dyn Fn(usize) -> LinkBlock,
) -> Vec<CheckResult> {
    let i = Complex64::new(0.0, 1.0);
    let mut rr: f64 = 0.0;
    let mut ll: f64 = 0.0;
    let mut lr: f64 = 0.0;
    for &(a, b, c) in &EPSILON_CYCLES {
        let ra = block_to_sparse(&right(a));
        let rb = block_to_sparse(&right(b));
        let rc = block_to_sparse(&right(c));
        let comm = ra.matmul(&rb).unwrap().sub(&rb.matmul(&ra).unwrap()).unwrap();
        rr = rr.max(comm.sub(&rc.scale(i)).unwrap().max_norm());

        let la = block_to_sparse(&left(a));
        let lb = block_to_sparse(&left(b));
        let lc = block_to_sparse(&left(c));
        let comm = la.matmul(&lb).unwrap().sub(&lb.matmul(&la).unwrap()).unwrap();
        ll = ll.max(comm.sub(&lc.scale(-i)).unwrap().max_norm());
    }
    for a in 1..=3 {
        for b in 1..=3 {
            let la = block_to_sparse(&left(a));
            let rb = block_to_sparse(&right(b));
            lr = lr.max(commutator_max_norm(&la, &rb).unwrap());
        }
    }
    // Casimir identity on the same blocks
    let mut sum_rr = SparseOperator::zero(LINK_DIM);
    let mut sum_ll = SparseOperator::zero(LINK_DIM);
    for a in 1..=3 {
        let r = block_to_sparse(&right(a));
        let l = block_to_sparse(&left(a));
        sum_rr = sum_rr.add(&r.matmul(&r).unwrap()).unwrap();
        sum_ll = sum_ll.add(&l.matmul(&l).unwrap()).unwrap();
    }
    let casimir = sum_rr.sub(&sum_ll).unwrap().max_norm();

    vec![
        CheckResult {
            name: "link_algebra_rr",
            residual: rr,
            tolerance: ALGEBRA_TOL,
        },
        CheckResult {
            name: "link_algebra_ll",
            residual: ll,
            tolerance: ALGEBRA_TOL,
        },
        CheckResult {
            name: "link_algebra_lr",
            residual: lr,
            tolerance: ALGEBRA_TOL,
        },
        CheckResult {
            name: "casimir_identity",
            residual: casimir,
            tolerance: ALGEBRA_TOL,
        },
    ]
}

/// The full check suite on the configured lattice.
pub fn run_all(config: &ExperimentConfig) -> Result<Vec<CheckResult>, CliError> {
    let cfg = config.lattice_config()?;
    let params = config.model_params();
    let basis = CompositeBasis::build(&cfg, config.run.filling).map_err(CliError::numerical)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.run.seed);
    let mut results = Vec::new();

    results.extend(link_algebra_checks(
        &|a| ops::left_field_block(a).expect("axis"),
        &|a| ops::right_field_block(a).expect("axis"),
    ));

    let h = model::h_lgt(&basis, &params).map_err(CliError::numerical)?;
    let scale = h.max_norm();

    // charge algebra [Q_a, Q_b] = i eps Q_c
    let mut worst: f64 = 0.0;
    for x in 0..cfg.n_sites() {
        for &(a, b, c) in &EPSILON_CYCLES {
            let qa = ops::charge(&basis, x, a).map_err(CliError::numerical)?;
            let qb = ops::charge(&basis, x, b).map_err(CliError::numerical)?;
            let qc = ops::charge(&basis, x, c).map_err(CliError::numerical)?;
            let comm = qa
                .matmul(&qb)
                .unwrap()
                .sub(&qb.matmul(&qa).unwrap())
                .unwrap();
            worst = worst.max(comm.sub(&qc.scale(Complex64::new(0.0, 1.0))).unwrap().max_norm());
        }
    }
    results.push(CheckResult {
        name: "charge_algebra",
        residual: worst,
        tolerance: ALGEBRA_TOL,
    });

    // Gauss algebra [G_a(x), G_b(y)] = -i delta_xy eps G_c(x)
    let mut worst: f64 = 0.0;
    for x in 0..cfg.n_sites() {
        for y in 0..cfg.n_sites() {
            for &(a, b, c) in &EPSILON_CYCLES {
                let ga = model::gauss(&basis, x, a).map_err(CliError::numerical)?;
                let gb = model::gauss(&basis, y, b).map_err(CliError::numerical)?;
                let comm = ga
                    .matmul(&gb)
                    .unwrap()
                    .sub(&gb.matmul(&ga).unwrap())
                    .unwrap();
                let expect = if x == y {
                    model::gauss(&basis, x, c)
                        .map_err(CliError::numerical)?
                        .scale(Complex64::new(0.0, -1.0))
                } else {
                    SparseOperator::zero(basis.dim())
                };
                worst = worst.max(comm.sub(&expect).unwrap().max_norm());
            }
        }
    }
    results.push(CheckResult {
        name: "gauss_algebra",
        residual: worst,
        tolerance: ALGEBRA_TOL,
    });

    // gauge invariance [G_a(x), H_LGT] = 0
    let mut worst: f64 = 0.0;
    for x in 0..cfg.n_sites() {
        for a in 1..=3 {
            let g = model::gauss(&basis, x, a).map_err(CliError::numerical)?;
            worst = worst.max(commutator_max_norm(&g, &h).unwrap());
        }
    }
    results.push(CheckResult {
        name: "gauge_invariance",
        residual: worst,
        tolerance: ALGEBRA_TOL * scale.max(1.0),
    });

    // structural checks: H_F, H_G diagonal; H_I strictly off-diagonal
    let hf = model::h_fermion(&basis, &params);
    let hg = model::h_gauge(&basis, &params).map_err(CliError::numerical)?;
    let hi = model::h_int(&basis, &params).map_err(CliError::numerical)?;
    let mut offdiag: f64 = 0.0;
    for (r, c, v) in hf.entries().chain(hg.entries()) {
        if r != c {
            offdiag = offdiag.max(v.norm());
        }
    }
    results.push(CheckResult {
        name: "mass_gauge_diagonal",
        residual: offdiag,
        tolerance: ALGEBRA_TOL,
    });
    let mut diag: f64 = 0.0;
    for (r, c, v) in hi.entries() {
        if r == c {
            diag = diag.max(v.norm());
        }
    }
    results.push(CheckResult {
        name: "interaction_offdiagonal",
        residual: diag,
        tolerance: ALGEBRA_TOL,
    });

    // hermiticity of every assembled term
    let hermiticity = [
        h.hermiticity_residual(),
        hf.hermiticity_residual(),
        hg.hermiticity_residual(),
        hi.hermiticity_residual(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    results.push(CheckResult {
        name: "hermiticity",
        residual: hermiticity,
        tolerance: ALGEBRA_TOL * scale.max(1.0),
    });

    // random gauge unitaries: unitarity and H invariance
    let g = EulerAngles::new(
        rng.gen::<f64>() * 2.0 * std::f64::consts::PI,
        rng.gen::<f64>() * std::f64::consts::PI,
        rng.gen::<f64>() * 4.0 * std::f64::consts::PI,
    )
    .map_err(CliError::numerical)?;
    let mut unitarity: f64 = 0.0;
    let mut invariance: f64 = 0.0;
    for x in 0..cfg.n_sites() {
        let v = gauge_unitary(&basis, x, &g).map_err(CliError::numerical)?;
        unitarity = unitarity.max(
            v.adjoint()
                .matmul(&v)
                .unwrap()
                .sub(&SparseOperator::identity(basis.dim()))
                .unwrap()
                .max_norm(),
        );
        invariance = invariance.max(h.conjugated_by(&v).unwrap().sub(&h).unwrap().max_norm());
    }
    results.push(CheckResult {
        name: "gauge_unitary_unitarity",
        residual: unitarity,
        tolerance: ALGEBRA_TOL,
    });
    results.push(CheckResult {
        name: "hamiltonian_drive_invariance",
        residual: invariance,
        tolerance: ALGEBRA_TOL * scale.max(1.0),
    });

    // number conservation across model operators
    let number = ops::total_number(&basis);
    let hp = Perturbation::Charge
        .build(&basis, &params)
        .map_err(CliError::numerical)?;
    let ht = Perturbation::Tunneling
        .build(&basis, &params)
        .map_err(CliError::numerical)?;
    let conservation = [
        commutator_max_norm(&number, &h).unwrap(),
        commutator_max_norm(&number, &hp).unwrap(),
        commutator_max_norm(&number, &ht).unwrap(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    results.push(CheckResult {
        name: "number_conservation",
        residual: conservation,
        tolerance: ALGEBRA_TOL * scale.max(1.0),
    });

    // exact tunneling cancellation at N = 3
    let grid = EulerGrid::new(3, GridScheme::HaarExact).map_err(CliError::numerical)?;
    let avg = group_average_lattice(&basis, &ht, &grid, AverageMode::PerVertex)
        .map_err(CliError::numerical)?;
    results.push(CheckResult {
        name: "tunneling_alpha_cancellation",
        residual: avg.max_norm(),
        tolerance: 1e-13,
    });

    // time average equals group average on a small schedule
    let grid2 = EulerGrid::new(2, GridScheme::HaarExact).map_err(CliError::numerical)?;
    let h0 = h.add(&hp).map_err(CliError::numerical)?;
    let schedule = build_schedule(
        &grid2,
        ScheduleMode::SingleVertex { site: 0 },
        cfg.n_sites(),
        1.0,
    )
    .map_err(CliError::numerical)?;
    let eff = effective_hamiltonian(&basis, &h0, &schedule).map_err(CliError::numerical)?;
    let avg = group_average_vertex(&basis, &h0, 0, &grid2).map_err(CliError::numerical)?;
    results.push(CheckResult {
        name: "time_average_equals_group_average",
        residual: eff.sub(&avg).unwrap().max_norm(),
        tolerance: ALGEBRA_TOL * h0.max_norm().max(1.0),
    });

    Ok(results)
}

/// Render the check report: one line per check with its max residual, with
/// the version and resolved config embedded like every other output.
pub fn render_report(config: &ExperimentConfig, results: &[CheckResult]) -> String {
    let mut out = String::new();
    let mut all_pass = true;
    out.push_str(&format!("# su2dd {} check\n", crate::output::VERSION));
    out.push_str(&format!(
        "# config {}\n",
        serde_json::to_string(config).expect("config serializes")
    ));
    for r in results {
        all_pass &= r.passed();
        out.push_str(&format!(
            "{:<36} residual {:>12.3e}  tol {:>9.1e}  {}\n",
            r.name,
            r.residual,
            r.tolerance,
            if r.passed() { "PASS" } else { "FAIL" }
        ));
    }
    out.push_str(if all_pass {
        "all checks passed\n"
    } else {
        "CHECK SUITE FAILED\n"
    });
    out
}
