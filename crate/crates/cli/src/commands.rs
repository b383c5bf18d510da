//! Implementations of the spectrum, converge and drive commands.

use num_complex::Complex64;
use serde::Serialize;

use su2dd_core::decouple::{
    build_schedule, effective_hamiltonian, evolve_and_measure, evolve_undriven,
    group_average_lattice, stroboscopic_propagator, EulerGrid, ScheduleMode,
    DENSE_PROPAGATOR_THRESHOLD,
};
use su2dd_core::dense;
use su2dd_core::hilbert::CompositeBasis;
use su2dd_core::model;
use su2dd_core::spectra::{
    cluster_degeneracies, convergence_study, default_cluster_tol, eigensolve,
    gauss_kernel_projector, loose_cluster_tol, EigCount,
};

use crate::config::ExperimentConfig;
use crate::output::{Cell, Table};
use crate::CliError;

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct SpectrumPayload {
    pub eigenvalues: Vec<f64>,
    /// (representative eigenvalue, multiplicity) at the tight tolerance.
    pub clusters: Vec<(f64, usize)>,
    /// Re-merged at the loose tolerance for comparison across schemes.
    pub clusters_merged: Vec<(f64, usize)>,
    pub solver: String,
}

pub fn run_spectrum(config: &ExperimentConfig) -> Result<(Table, SpectrumPayload), CliError> {
    let cfg = config.lattice_config()?;
    let params = config.model_params();
    let basis = CompositeBasis::build(&cfg, config.run.filling).map_err(CliError::from_core)?;
    let h_lgt = model::h_lgt(&basis, &params).map_err(CliError::from_core)?;
    let perturbation = su2dd_core::spectra::Perturbation::from(config.run.perturbation)
        .build(&basis, &params)
        .map_err(CliError::from_core)?;

    let h = if config.run.averaged {
        let grid =
            EulerGrid::new(config.grid.n, config.grid.scheme.into()).map_err(CliError::from_core)?;
        let averaged = group_average_lattice(&basis, &perturbation, &grid, config.grid.mode.into())
            .map_err(CliError::from_core)?;
        h_lgt
            .add(&averaged)
            .and_then(|h| h.flag_hermitian())
            .map_err(CliError::from_core)?
    } else {
        h_lgt
            .add(&perturbation)
            .and_then(|h| h.flag_hermitian())
            .map_err(CliError::from_core)?
    };

    // full spectrum while dense diagonalization is affordable, the lowest
    // block from the iterative backend above the threshold
    let count = if h.dim() <= su2dd_core::spectra::DENSE_EIG_THRESHOLD {
        EigCount::All
    } else {
        EigCount::Lowest(8 * config.run.levels.max(1))
    };
    let spec = eigensolve(&h, count).map_err(CliError::from_core)?;
    let tight = cluster_degeneracies(&spec, default_cluster_tol(&spec));
    let loose = cluster_degeneracies(&spec, loose_cluster_tol(&spec));

    let mut rows = Vec::new();
    for (i, &e) in spec.eigenvalues.iter().enumerate() {
        rows.push(vec![
            Cell::Text("eigenvalue".into()),
            Cell::Int(i),
            Cell::Float(e),
            Cell::Empty,
        ]);
    }
    for (i, &(e, m)) in tight.clusters.iter().enumerate() {
        rows.push(vec![
            Cell::Text("cluster".into()),
            Cell::Int(i),
            Cell::Float(e),
            Cell::Int(m),
        ]);
    }
    for (i, &(e, m)) in loose.clusters.iter().enumerate() {
        rows.push(vec![
            Cell::Text("cluster_merged".into()),
            Cell::Int(i),
            Cell::Float(e),
            Cell::Int(m),
        ]);
    }
    let table = Table {
        columns: vec!["section", "index", "energy", "multiplicity"],
        rows,
    };
    let payload = SpectrumPayload {
        eigenvalues: spec.eigenvalues.clone(),
        clusters: tight.clusters,
        clusters_merged: loose.clusters,
        solver: spec.solver.to_string(),
    };
    Ok((table, payload))
}

// ---------------------------------------------------------------------------
// converge
// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct ConvergeRowPayload {
    pub n: usize,
    pub level_index: usize,
    pub energy: f64,
    pub multiplicity: usize,
    pub reference_energy: f64,
    pub rel_error: f64,
    pub scheme: String,
    pub boundary: String,
}

#[derive(Serialize)]
pub struct ConvergePayload {
    pub rows: Vec<ConvergeRowPayload>,
}

pub fn run_converge(config: &ExperimentConfig) -> Result<(Table, ConvergePayload), CliError> {
    let cfg = config.lattice_config()?;
    let params = config.model_params();
    let n_list = config.n_list();
    if n_list.is_empty() {
        return Err(CliError::validation("n_list must not be empty".into()));
    }
    let table = convergence_study(
        &cfg,
        &params,
        config.run.perturbation.into(),
        &n_list,
        config.grid.scheme.into(),
        config.grid.mode.into(),
        config.run.levels,
    )
    .map_err(CliError::from_core)?;

    let scheme_name = match config.grid.scheme {
        crate::config::SchemeOpt::Cube => "cube",
        crate::config::SchemeOpt::Haar => "haar",
    };
    let mut rows = Vec::new();
    let mut payload_rows = Vec::new();
    for r in &table.rows {
        rows.push(vec![
            Cell::Int(r.n),
            Cell::Int(r.level_index),
            Cell::Float(r.energy),
            Cell::Int(r.multiplicity),
            Cell::Float(r.reference_energy),
            Cell::Float(r.rel_error),
            Cell::Text(scheme_name.into()),
            Cell::Text(table.boundary.into()),
        ]);
        payload_rows.push(ConvergeRowPayload {
            n: r.n,
            level_index: r.level_index,
            energy: r.energy,
            multiplicity: r.multiplicity,
            reference_energy: r.reference_energy,
            rel_error: r.rel_error,
            scheme: scheme_name.into(),
            boundary: table.boundary.into(),
        });
    }
    let csv = Table {
        columns: vec![
            "N",
            "level_index",
            "energy",
            "multiplicity",
            "reference_energy",
            "rel_error",
            "scheme",
            "boundary",
        ],
        rows,
    };
    Ok((csv, ConvergePayload { rows: payload_rows }))
}

// ---------------------------------------------------------------------------
// drive
// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct DrivePeriodRow {
    pub index: usize,
    pub time: f64,
    pub violation_driven: f64,
    pub violation_undriven: f64,
    pub propagator_distance: f64,
}

#[derive(Serialize)]
pub struct DriveScalingRow {
    pub period: f64,
    pub error: f64,
    pub ratio: Option<f64>,
}

#[derive(Serialize)]
pub struct DrivePayload {
    pub periods: Vec<DrivePeriodRow>,
    pub scaling: Vec<DriveScalingRow>,
}

pub fn run_drive(config: &ExperimentConfig) -> Result<(Table, DrivePayload), CliError> {
    let cfg = config.lattice_config()?;
    let params = config.model_params();
    let basis = CompositeBasis::build(&cfg, config.run.filling).map_err(CliError::from_core)?;
    let h_lgt = model::h_lgt(&basis, &params).map_err(CliError::from_core)?;
    let perturbation = su2dd_core::spectra::Perturbation::from(config.run.perturbation)
        .build(&basis, &params)
        .map_err(CliError::from_core)?;
    let h0 = h_lgt
        .add(&perturbation)
        .and_then(|h| h.flag_hermitian())
        .map_err(CliError::from_core)?;
    let violation = model::gauge_violation_operator(&basis).map_err(CliError::from_core)?;

    // initial state: ground state of H_LGT within the Gauss-law kernel
    let kernel = gauss_kernel_projector(&basis).map_err(CliError::from_core)?;
    if kernel.dimension == 0 {
        return Err(CliError::numerical_msg("empty Gauss-law kernel".into()));
    }
    let k = &kernel.basis_vectors;
    let h_in_kernel = k.adjoint() * h_lgt.to_dense() * k;
    let (_, vecs) = dense::eigh(&h_in_kernel);
    let ground = k * vecs.column(0);
    let mut psi0: Vec<Complex64> = ground.iter().copied().collect();
    let norm: f64 = psi0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for v in psi0.iter_mut() {
        *v /= Complex64::new(norm, 0.0);
    }

    let grid = EulerGrid::new(config.run.drive_grid_n, config.grid.scheme.into())
        .map_err(CliError::from_core)?;
    let schedule = build_schedule(
        &grid,
        ScheduleMode::Staggered,
        cfg.n_sites(),
        config.run.period,
    )
    .map_err(CliError::from_core)?;

    let observables = [("violation", &violation)];
    let driven = evolve_and_measure(
        &basis,
        &psi0,
        &h0,
        &schedule,
        config.run.n_periods,
        &observables,
    )
    .map_err(CliError::from_core)?;
    let undriven = evolve_undriven(
        &psi0,
        &h0,
        config.run.period,
        config.run.n_periods,
        &observables,
    )
    .map_err(CliError::from_core)?;

    // distance between stroboscopic and effective-Hamiltonian evolution
    let h_eff = effective_hamiltonian(&basis, &h0, &schedule).map_err(CliError::from_core)?;
    let u_strob = stroboscopic_propagator(&basis, &h0, &schedule, DENSE_PROPAGATOR_THRESHOLD)
        .map_err(CliError::from_core)?;
    let u_eff = dense::exp_i_hermitian(&h_eff.to_dense(), schedule.period());
    let dim = basis.dim();
    let mut strob_pow = nalgebra::DMatrix::<Complex64>::identity(dim, dim);
    let mut eff_pow = nalgebra::DMatrix::<Complex64>::identity(dim, dim);

    let mut periods = Vec::new();
    for idx in 0..=config.run.n_periods {
        let distance = (&strob_pow - &eff_pow).map(|z| z.norm()).max();
        periods.push(DrivePeriodRow {
            index: idx,
            time: driven.times[idx],
            violation_driven: driven.values[idx][0],
            violation_undriven: undriven.values[idx][0],
            propagator_distance: distance,
        });
        if idx < config.run.n_periods {
            strob_pow = &u_strob * strob_pow;
            eff_pow = &u_eff * eff_pow;
        }
    }

    // Magnus first-order scaling table at T, T/2, T/4
    let mut scaling = Vec::new();
    let mut previous: Option<f64> = None;
    for divisor in [1.0, 2.0, 4.0] {
        let period = config.run.period / divisor;
        let s = schedule.with_period(period).map_err(CliError::from_core)?;
        let u = stroboscopic_propagator(&basis, &h0, &s, DENSE_PROPAGATOR_THRESHOLD)
            .map_err(CliError::from_core)?;
        let u_ref = dense::exp_i_hermitian(&h_eff.to_dense(), period);
        let error = (u - u_ref).map(|z| z.norm()).max();
        scaling.push(DriveScalingRow {
            period,
            error,
            ratio: previous.map(|p| p / error),
        });
        previous = Some(error);
    }

    let mut rows = Vec::new();
    for r in &periods {
        rows.push(vec![
            Cell::Text("period".into()),
            Cell::Int(r.index),
            Cell::Float(r.time),
            Cell::Float(r.violation_driven),
            Cell::Float(r.violation_undriven),
            Cell::Float(r.propagator_distance),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
        ]);
    }
    for (i, r) in scaling.iter().enumerate() {
        rows.push(vec![
            Cell::Text("scaling".into()),
            Cell::Int(i),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Float(r.period),
            Cell::Float(r.error),
            match r.ratio {
                Some(v) => Cell::Float(v),
                None => Cell::Empty,
            },
        ]);
    }
    let table = Table {
        columns: vec![
            "section",
            "index",
            "time",
            "violation_driven",
            "violation_undriven",
            "propagator_distance",
            "scaling_period",
            "scaling_error",
            "scaling_ratio",
        ],
        rows,
    };
    Ok((table, DrivePayload { periods, scaling }))
}

