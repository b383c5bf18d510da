//! Acceptance suite: every criterion runs at its stated tolerance and
//! prints one pass/fail line (visible with `--nocapture`).

use std::process::Command;

use num_complex::Complex64;

use su2dd_core::decouple::{
    build_schedule, effective_hamiltonian, gauge_unitary, group_average_lattice,
    group_average_vertex, stroboscopic_propagator, AverageMode, EulerAngles, EulerGrid,
    GridScheme, ScheduleMode,
};
use su2dd_core::dense;
use su2dd_core::hilbert::{Boundary, CompositeBasis, LatticeConfig, LINK_DIM};
use su2dd_core::model::{self, ModelParams};
use su2dd_core::ops;
use su2dd_core::sparse::{commutator_max_norm, SparseOperator};
use su2dd_core::spectra::{convergence_study, Perturbation};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn basis(n: usize, boundary: Boundary) -> CompositeBasis {
    let cfg = LatticeConfig::new(n, boundary).unwrap();
    CompositeBasis::build(&cfg, None).unwrap()
}

fn block_to_sparse(b: &ops::LinkBlock) -> SparseOperator {
    let mut t = Vec::new();
    for (i, row) in b.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v.re != 0.0 || v.im != 0.0 {
                t.push((i, j, v));
            }
        }
    }
    SparseOperator::from_triplets(LINK_DIM, t, false).unwrap()
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion} failed: {detail}");
}

const CYCLES: [(usize, usize, usize); 3] = [(1, 2, 3), (2, 3, 1), (3, 1, 2)];

#[test]
fn criterion_1_algebra_suite() {
    let started = std::time::Instant::now();
    let mut worst: f64 = 0.0;
    let i = c(0.0, 1.0);
    for &(a, b, cc) in &CYCLES {
        let ra = block_to_sparse(&ops::right_field_block(a).unwrap());
        let rb = block_to_sparse(&ops::right_field_block(b).unwrap());
        let rc = block_to_sparse(&ops::right_field_block(cc).unwrap());
        let comm = ra.matmul(&rb).unwrap().sub(&rb.matmul(&ra).unwrap()).unwrap();
        worst = worst.max(comm.sub(&rc.scale(i)).unwrap().max_norm());

        let la = block_to_sparse(&ops::left_field_block(a).unwrap());
        let lb = block_to_sparse(&ops::left_field_block(b).unwrap());
        let lc = block_to_sparse(&ops::left_field_block(cc).unwrap());
        let comm = la.matmul(&lb).unwrap().sub(&lb.matmul(&la).unwrap()).unwrap();
        worst = worst.max(comm.sub(&lc.scale(-i)).unwrap().max_norm());
    }
    for a in 1..=3 {
        for b in 1..=3 {
            let la = block_to_sparse(&ops::left_field_block(a).unwrap());
            let rb = block_to_sparse(&ops::right_field_block(b).unwrap());
            worst = worst.max(commutator_max_norm(&la, &rb).unwrap());
        }
    }
    // Casimir identity on the 5x5 blocks
    let mut rr = SparseOperator::zero(LINK_DIM);
    let mut ll = SparseOperator::zero(LINK_DIM);
    for a in 1..=3 {
        let r = block_to_sparse(&ops::right_field_block(a).unwrap());
        let l = block_to_sparse(&ops::left_field_block(a).unwrap());
        rr = rr.add(&r.matmul(&r).unwrap()).unwrap();
        ll = ll.add(&l.matmul(&l).unwrap()).unwrap();
    }
    worst = worst.max(rr.sub(&ll).unwrap().max_norm());

    // single-vertex charge algebra
    let b2 = basis(2, Boundary::Open);
    for x in 0..2 {
        for &(a, b, cc) in &CYCLES {
            let qa = ops::charge(&b2, x, a).unwrap();
            let qb = ops::charge(&b2, x, b).unwrap();
            let qc = ops::charge(&b2, x, cc).unwrap();
            let comm = qa.matmul(&qb).unwrap().sub(&qb.matmul(&qa).unwrap()).unwrap();
            worst = worst.max(comm.sub(&qc.scale(i)).unwrap().max_norm());
        }
    }
    let elapsed = started.elapsed();
    report(
        "1 algebra suite",
        worst < 1e-12 && elapsed.as_secs_f64() < 1.0,
        &format!("max residual {worst:.3e} (tol 1e-12), {elapsed:.2?} (< 1 s)"),
    );
}

#[test]
#[allow(clippy::needless_range_loop)]
fn criterion_2_gauge_invariance() {
    let started = std::time::Instant::now();
    let p = ModelParams::reference();
    let mut worst_rel: f64 = 0.0;
    let mut worst_algebra: f64 = 0.0;
    for n in [2usize, 3] {
        for boundary in [Boundary::Open, Boundary::Periodic] {
            let b = basis(n, boundary);
            let h = model::h_lgt(&b, &p).unwrap();
            let scale = h.max_norm();
            let gauss: Vec<Vec<SparseOperator>> = (0..n)
                .map(|x| (1..=3).map(|a| model::gauss(&b, x, a).unwrap()).collect())
                .collect();
            for x in 0..n {
                for a in 1..=3 {
                    let r = commutator_max_norm(&gauss[x][a - 1], &h).unwrap();
                    worst_rel = worst_rel.max(r / scale);
                }
            }
            for x in 0..n {
                for y in 0..n {
                    for &(a, bb, cc) in &CYCLES {
                        let comm = gauss[x][a - 1]
                            .matmul(&gauss[y][bb - 1])
                            .unwrap()
                            .sub(&gauss[y][bb - 1].matmul(&gauss[x][a - 1]).unwrap())
                            .unwrap();
                        let expect = if x == y {
                            gauss[x][cc - 1].scale(c(0.0, -1.0))
                        } else {
                            SparseOperator::zero(b.dim())
                        };
                        worst_algebra =
                            worst_algebra.max(comm.sub(&expect).unwrap().max_norm() / scale);
                    }
                }
            }
        }
    }
    let elapsed = started.elapsed();
    report(
        "2 gauge invariance",
        worst_rel < 1e-12 && worst_algebra < 1e-12 && elapsed.as_secs_f64() < 10.0,
        &format!(
            "[G,H]/scale {worst_rel:.3e}, Gauss algebra {worst_algebra:.3e} (tol 1e-12), {elapsed:.2?} (< 10 s)"
        ),
    );
}

#[test]
fn criterion_3_exact_tunneling_cancellation() {
    let started = std::time::Instant::now();
    let p = ModelParams::reference();
    let b = basis(2, Boundary::Periodic);
    let ht = model::perturbation_tunneling(&b, &p).unwrap();
    let mut worst: f64 = 0.0;
    for n in [3usize, 4, 5, 8] {
        let grid = EulerGrid::new(n, GridScheme::HaarExact).unwrap();
        let avg = group_average_lattice(&b, &ht, &grid, AverageMode::PerVertex).unwrap();
        worst = worst.max(avg.max_norm());
    }
    // staggered route at one grid size as well
    let grid = EulerGrid::new(3, GridScheme::HaarExact).unwrap();
    let avg = group_average_lattice(&b, &ht, &grid, AverageMode::Staggered).unwrap();
    worst = worst.max(avg.max_norm());
    let elapsed = started.elapsed();
    report(
        "3 exact tunneling cancellation",
        worst < 1e-13 && elapsed.as_secs_f64() < 10.0,
        &format!("max entry {worst:.3e} (tol 1e-13), {elapsed:.2?} (< 10 s)"),
    );
}

#[test]
fn criterion_4_convergence_reproduction() {
    let started = std::time::Instant::now();
    let p = ModelParams::reference();
    let mut any_pass = false;
    let mut details = String::new();
    for boundary in [Boundary::Open, Boundary::Periodic] {
        for scheme in [GridScheme::CubeUniform, GridScheme::HaarExact] {
            let cfg = LatticeConfig::new(2, boundary).unwrap();
            let table = convergence_study(
                &cfg,
                &p,
                Perturbation::Charge,
                &[2, 10],
                scheme,
                AverageMode::PerVertex,
                3,
            )
            .unwrap();
            let err_at = |n: usize, level: usize| {
                table
                    .rows
                    .iter()
                    .find(|r| r.n == n && r.level_index == level)
                    .map(|r| r.rel_error)
                    .unwrap_or(f64::INFINITY)
            };
            let pass = (0..3).all(|l| {
                let e10 = err_at(10, l);
                e10 < 0.02 && e10 < err_at(2, l)
            });
            any_pass |= pass;
            details.push_str(&format!(
                "[{boundary:?}/{scheme:?}: N=10 errors {:.1e},{:.1e},{:.1e} {}] ",
                err_at(10, 0),
                err_at(10, 1),
                err_at(10, 2),
                if pass { "ok" } else { "reject" },
            ));
        }
    }
    let elapsed = started.elapsed();
    report(
        "4 convergence reproduction",
        any_pass && elapsed.as_secs_f64() < 120.0,
        &format!("{details}{elapsed:.2?} (< 2 min)"),
    );
}

#[test]
fn criterion_5_averaging_identity() {
    let started = std::time::Instant::now();
    let p = ModelParams::reference();
    let mut worst_identity: f64 = 0.0;

    // Eq-(10) <-> Eq-(12): time average over a schedule equals the group
    // average for the same grid
    let b = basis(2, Boundary::Periodic);
    let h0 = model::h_lgt(&b, &p)
        .unwrap()
        .add(&model::perturbation_charge(&b, &p).unwrap())
        .unwrap();
    let grid = EulerGrid::new(2, GridScheme::HaarExact).unwrap();
    let scale = h0.max_norm();

    let s = build_schedule(&grid, ScheduleMode::SingleVertex { site: 0 }, 2, 1.0).unwrap();
    let eff = effective_hamiltonian(&b, &h0, &s).unwrap();
    let avg = group_average_vertex(&b, &h0, 0, &grid).unwrap();
    worst_identity = worst_identity.max(eff.sub(&avg).unwrap().max_norm() / scale);

    let s = build_schedule(&grid, ScheduleMode::Staggered, 2, 1.0).unwrap();
    let eff = effective_hamiltonian(&b, &h0, &s).unwrap();
    let avg = group_average_lattice(&b, &h0, &grid, AverageMode::Staggered).unwrap();
    worst_identity = worst_identity.max(eff.sub(&avg).unwrap().max_norm() / scale);

    // staggered equals per-vertex on bipartite layouts, both perturbations
    let mut worst_modes: f64 = 0.0;
    for (n, boundary) in [(2usize, Boundary::Periodic), (3, Boundary::Open)] {
        let b = basis(n, boundary);
        let h = model::h_lgt(&b, &p).unwrap();
        for pert in [Perturbation::Charge, Perturbation::Tunneling] {
            let h0 = h.add(&pert.build(&b, &p).unwrap()).unwrap();
            let pv = group_average_lattice(&b, &h0, &grid, AverageMode::PerVertex).unwrap();
            let st = group_average_lattice(&b, &h0, &grid, AverageMode::Staggered).unwrap();
            worst_modes =
                worst_modes.max(pv.sub(&st).unwrap().max_norm() / h0.max_norm());
        }
    }
    let elapsed = started.elapsed();
    report(
        "5 averaging identity",
        worst_identity < 1e-12 && worst_modes < 1e-12 && elapsed.as_secs_f64() < 60.0,
        &format!(
            "time-average identity {worst_identity:.3e}, staggered vs per-vertex {worst_modes:.3e} (tol 1e-12), {elapsed:.2?} (< 1 min)"
        ),
    );
}

#[test]
fn criterion_6_magnus_scaling() {
    let started = std::time::Instant::now();
    let p = ModelParams::reference();
    let b = basis(2, Boundary::Open);
    let h0 = model::h_lgt(&b, &p)
        .unwrap()
        .add(&model::perturbation_charge(&b, &p).unwrap())
        .unwrap();
    let grid = EulerGrid::new(2, GridScheme::HaarExact).unwrap();
    let mut errors = Vec::new();
    for period in [0.2, 0.1, 0.05] {
        let s = build_schedule(&grid, ScheduleMode::Staggered, 2, period).unwrap();
        let u = stroboscopic_propagator(&b, &h0, &s, 1024).unwrap();
        let h_eff = effective_hamiltonian(&b, &h0, &s).unwrap();
        let u_ref = dense::exp_i_hermitian(&h_eff.to_dense(), period);
        errors.push((u - u_ref).map(|z| z.norm()).max());
    }
    let r1 = errors[0] / errors[1];
    let r2 = errors[1] / errors[2];
    let ok = (3.2..=4.8).contains(&r1) && (3.2..=4.8).contains(&r2);
    let elapsed = started.elapsed();
    report(
        "6 magnus scaling",
        ok && elapsed.as_secs_f64() < 60.0,
        &format!("ratios {r1:.3}, {r2:.3} (window [3.2, 4.8]), {elapsed:.2?} (< 1 min)"),
    );
}

#[test]
fn criterion_7_haar_averaging_decay() {
    let started = std::time::Instant::now();
    let p = ModelParams::reference();
    let b = basis(2, Boundary::Periodic);
    let hp = model::perturbation_charge(&b, &p).unwrap();
    let h = model::h_lgt(&b, &p).unwrap().add(&hp).unwrap();

    let norm_at = |n: usize| -> f64 {
        let grid = EulerGrid::new(n, GridScheme::HaarExact).unwrap();
        group_average_lattice(&b, &hp, &grid, AverageMode::PerVertex)
            .unwrap()
            .max_norm()
    };
    let n2 = norm_at(2);
    let n10 = norm_at(10);
    let decay_ok = n10 * 5.0 <= n2;

    let g = EulerAngles::new(2.31, 1.17, 9.4).unwrap();
    let v = gauge_unitary(&b, 0, &g).unwrap();
    let comm_at = |n: usize| -> f64 {
        let grid = EulerGrid::new(n, GridScheme::HaarExact).unwrap();
        let avg = group_average_lattice(&b, &h, &grid, AverageMode::PerVertex).unwrap();
        commutator_max_norm(&avg, &v).unwrap()
    };
    let c2 = comm_at(2);
    let c10 = comm_at(10);
    let invariance_ok = c10 < c2;

    let elapsed = started.elapsed();
    report(
        "7 haar averaging decay",
        decay_ok && invariance_ok && elapsed.as_secs_f64() < 60.0,
        &format!(
            "|Pi_N(HP)| {n2:.3e} -> {n10:.3e} (>= 5x), commutator {c2:.3e} -> {c10:.3e}, {elapsed:.2?} (< 1 min)"
        ),
    );
}

#[test]
fn criterion_8_determinism() {
    let bin = env!("CARGO_BIN_EXE_su2dd");
    let dir = std::env::temp_dir();
    let out1 = dir.join(format!("su2dd_det_{}_1.csv", std::process::id()));
    let out2 = dir.join(format!("su2dd_det_{}_2.csv", std::process::id()));
    for out in [&out1, &out2] {
        let status = Command::new(bin)
            .args([
                "converge",
                "--n-list",
                "2,4,10",
                "--seed",
                "42",
                "--out",
                out.to_str().unwrap(),
            ])
            .status()
            .expect("binary runs");
        assert!(status.success());
    }
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    let _ = std::fs::remove_file(&out1);
    let _ = std::fs::remove_file(&out2);
    report(
        "8 determinism",
        a == b,
        &format!("two runs, {} bytes each, byte-identical: {}", a.len(), a == b),
    );
}
