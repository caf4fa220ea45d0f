//! Scenario runner and invariant batteries behind the CLI.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::config::ScenarioConfig;
use crate::contact::{self, contact_field, legendre_point, ContactPoint, FiberHamiltonian};
use crate::density::{AxisPoly, Density, Quadratic, QuadraticFormPlusQuartic};
use crate::error::{Error, Result};
use crate::forms::{
    exterior_derivative, hodge, pair_complementary, sample_cochain, trace_boundary, Cochain,
    Staggering,
};
use crate::infogeo::{
    alpha_connection, canonical_divergence, duality_pairing_check, fiber_metric,
    legendre_transform, pythagoras_check, DuallyFlatChart, SearchBox,
};
use crate::mesh::Mesh;
use crate::phs::{energy, make_preset, power_balance, step, EnergySpec, PHSState};
use crate::snapshot::write_snapshot;
use crate::stokes_dirac::{check_isotropy, dimension_count, implemented_signatures, Signature};

fn fmt(v: f64) -> String {
    format!("{:.16e}", v)
}

/// One verification row: a named residual against its tolerance.
#[derive(Debug, Clone)]
pub struct CheckRow {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl CheckRow {
    pub fn pass(&self) -> bool {
        self.residual <= self.tolerance
    }

    pub fn line(&self) -> String {
        format!(
            "{} {} residual={:.3e} tol={:.1e}",
            if self.pass() { "PASS" } else { "FAIL" },
            self.name,
            self.residual,
            self.tolerance
        )
    }
}

/// Outcome of a `run`: artifacts on disk plus verification status.
#[derive(Debug)]
pub struct RunOutcome {
    pub rows_written: usize,
    pub checks: Vec<CheckRow>,
}

impl RunOutcome {
    pub fn verification_ok(&self) -> bool {
        self.checks.iter().all(CheckRow::pass)
    }
}

fn deterministic_noise_cochain(
    mesh: &Arc<Mesh>,
    degree: usize,
    grid: Staggering,
    seed: u64,
) -> Cochain {
    let lengths: Vec<f64> = mesh
        .spacings()
        .iter()
        .zip(mesh.cells_per_axis())
        .map(|(h, &m)| h * m as f64)
        .collect();
    sample_cochain(mesh, degree, grid, move |x, s| {
        let tag = s.iter().fold(seed.wrapping_mul(31), |a, &b| {
            a.wrapping_add(b as u64 + 1).wrapping_mul(0x9e3779b97f4a7c15)
        });
        let mut v = 0.0;
        for m in 1..=3u64 {
            let c = ((tag.wrapping_mul(m) >> 17) % 1000) as f64 / 500.0 - 1.0;
            let mut phase = (tag.wrapping_mul(m) >> 7 & 0xffff) as f64 / 65536.0
                * std::f64::consts::TAU;
            for (xi, li) in x.iter().zip(&lengths) {
                phase += std::f64::consts::TAU * m as f64 * xi / li;
            }
            v += c * phase.sin();
        }
        v
    })
    .expect("degree in range")
}

/// Run a scenario end to end, writing `series.csv`, snapshots and reports
/// into the output directory.
pub fn run(cfg: &ScenarioConfig, out_override: Option<&Path>) -> Result<RunOutcome> {
    let out_dir = out_override.unwrap_or(&cfg.out_dir).to_path_buf();
    std::fs::create_dir_all(&out_dir)?;
    let sig = cfg.preset.signature();
    let mesh = Mesh::new(sig.n, &cfg.cells, &cfg.lengths)?;
    let (mut state, _) = make_preset(cfg.preset, &mesh, &cfg.init)?;
    let spec = cfg.energy.clone();
    // validate the spec against the signature before the loop
    energy(&state, &spec)?;

    let mut series = String::from("t,E,dE_dt,boundary_flux,residual\n");
    let mut checks: Vec<CheckRow> = Vec::new();
    let mut max_pb_residual = 0.0_f64;
    let mut lift_maxes = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let mut last_lift_rows: Option<String> = None;

    for istep in 1..=cfg.steps {
        state = step(&state, &spec, cfg.boundary, cfg.dt, cfg.scheme)?;
        let pb = power_balance(&state, &spec, cfg.boundary, cfg.dt)?;
        let e = energy(&state, &spec)?;
        max_pb_residual = max_pb_residual.max(pb.residual / e.abs().max(1e-300).max(1.0));
        let _ = writeln!(
            series,
            "{},{},{},{},{}",
            fmt(pb.time),
            fmt(e),
            fmt(pb.d_energy_dt),
            fmt(pb.boundary_flux),
            fmt(pb.residual)
        );
        if cfg.snapshot_every > 0 && istep % cfg.snapshot_every == 0 {
            write_state_snapshots(&out_dir, &state, istep)?;
        }
        if cfg.verify_lift && cfg.verify_every > 0 && istep % cfg.verify_every == 0 {
            let rep = contact::verify_lift_with_effort_fault(
                &state,
                &spec,
                cfg.boundary,
                cfg.kappa,
                cfg.corrupt_effort,
            )?;
            lift_maxes.0 = lift_maxes.0.max(rep.max_res_x);
            lift_maxes.1 = lift_maxes.1.max(rep.max_res_y);
            lift_maxes.2 = lift_maxes.2.max(rep.max_res_z);
            lift_maxes.3 = lift_maxes.3.max(rep.max_h);
            let mut csv = String::from("cell,res_x,res_y,res_z,h_psi\n");
            for r in &rep.rows {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{}",
                    r.cell,
                    fmt(r.res_x),
                    fmt(r.res_y),
                    fmt(r.res_z),
                    fmt(r.h_psi)
                );
            }
            last_lift_rows = Some(csv);
        }
    }
    std::fs::write(out_dir.join("series.csv"), series)?;
    write_state_snapshots(&out_dir, &state, cfg.steps)?;

    checks.push(CheckRow {
        name: "power_balance_relative_residual".into(),
        residual: max_pb_residual,
        tolerance: 1e-10,
    });
    if let Some(csv) = last_lift_rows {
        std::fs::write(out_dir.join("lift_report.csv"), csv)?;
        let quadratic = matches!(spec, EnergySpec::Quadratic { .. });
        checks.push(CheckRow {
            name: "lift_residual_x".into(),
            residual: lift_maxes.0,
            tolerance: 1e-10,
        });
        // the pointwise-density effort averaging is second-order accurate at
        // cell centers, so the y-block and h residuals are O(h^2) there
        checks.push(CheckRow {
            name: "lift_residual_y".into(),
            residual: lift_maxes.1,
            tolerance: if quadratic { 1e-10 } else { 1e-2 },
        });
        checks.push(CheckRow {
            name: "lift_residual_z".into(),
            residual: lift_maxes.2,
            tolerance: if quadratic { 1e-8 } else { 1e-2 },
        });
        checks.push(CheckRow {
            name: "lift_h_psi".into(),
            residual: lift_maxes.3,
            tolerance: if quadratic { 1e-12 } else { 1e-2 },
        });
    }
    if cfg.verify_stokes_dirac {
        let mut worst = 0.0_f64;
        for seed in 0..10u64 {
            let e_p1 = deterministic_noise_cochain(&mesh, sig.n - sig.p, Staggering::Primal, seed);
            let e_q1 =
                deterministic_noise_cochain(&mesh, sig.n - sig.q, Staggering::Dual, seed + 100);
            let e_p2 =
                deterministic_noise_cochain(&mesh, sig.n - sig.p, Staggering::Primal, seed + 200);
            let e_q2 =
                deterministic_noise_cochain(&mesh, sig.n - sig.q, Staggering::Dual, seed + 300);
            worst = worst.max(check_isotropy(&e_p1, &e_q1, &e_p2, &e_q2, sig)?);
        }
        checks.push(CheckRow {
            name: "stokes_dirac_isotropy".into(),
            residual: worst,
            tolerance: 1e-10,
        });
    }
    if cfg.verify_infogeo {
        let (np, nq) = contact::fiber_blocks(sig);
        let dim = np + nq;
        let psi = Quadratic::unit(dim);
        let chart = DuallyFlatChart::new(&psi);
        let mut csv = String::from("xi,xi_prime,D\n");
        let mut samples: Vec<Vec<f64>> = Vec::new();
        for i in 0..6 {
            samples.push(
                (0..dim)
                    .map(|a| ((i * dim + a) as f64 * 0.37).sin())
                    .collect(),
            );
        }
        for a in &samples {
            for b in &samples {
                let d = canonical_divergence(&chart, a, b);
                let _ = writeln!(
                    csv,
                    "{},{},{}",
                    join_components(a),
                    join_components(b),
                    fmt(d)
                );
            }
        }
        std::fs::write(out_dir.join("divergences.csv"), csv)?;
        for row in infogeo_battery()? {
            checks.push(row);
        }
    }
    let rows_written = cfg.steps;
    Ok(RunOutcome {
        rows_written,
        checks,
    })
}

fn join_components(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{:.6}", x))
        .collect::<Vec<_>>()
        .join(";")
}

fn write_state_snapshots(out_dir: &Path, state: &PHSState, istep: usize) -> Result<()> {
    std::fs::write(
        out_dir.join(format!("alpha_p_{istep}.coch")),
        write_snapshot(&state.alpha_p),
    )?;
    std::fs::write(
        out_dir.join(format!("alpha_q_{istep}.coch")),
        write_snapshot(&state.alpha_q),
    )?;
    Ok(())
}

/// The named verification suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Hodge,
    Stokes,
    Dirac,
    Contact,
    Infogeo,
    All,
}

impl Suite {
    pub fn parse(name: &str) -> Result<Suite> {
        match name {
            "hodge" => Ok(Suite::Hodge),
            "stokes" => Ok(Suite::Stokes),
            "dirac" => Ok(Suite::Dirac),
            "contact" => Ok(Suite::Contact),
            "infogeo" => Ok(Suite::Infogeo),
            "all" => Ok(Suite::All),
            other => Err(Error::UnknownSuite(other.to_string())),
        }
    }
}

/// Run one suite's battery on built-in small meshes.
pub fn verify_suite(suite: Suite) -> Result<Vec<CheckRow>> {
    match suite {
        Suite::All => {
            let mut rows = Vec::new();
            for s in [Suite::Hodge, Suite::Stokes, Suite::Dirac, Suite::Contact, Suite::Infogeo] {
                rows.extend(verify_suite(s)?);
            }
            Ok(rows)
        }
        Suite::Hodge => hodge_battery(),
        Suite::Stokes => stokes_battery(),
        Suite::Dirac => dirac_battery(),
        Suite::Contact => contact_battery(),
        Suite::Infogeo => infogeo_battery(),
    }
}

fn battery_meshes() -> Vec<Arc<Mesh>> {
    vec![
        Mesh::new(1, &[9], &[1.1]).expect("valid"),
        Mesh::new(2, &[4, 3], &[1.0, 0.8]).expect("valid"),
        Mesh::new(3, &[3, 2, 3], &[1.0, 1.2, 0.9]).expect("valid"),
    ]
}

/// Hodge lemma battery: involution signs and pairing positivity per
/// dimension.
pub fn hodge_battery() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for mesh in battery_meshes() {
        let n = mesh.dim();
        let mut worst = 0.0_f64;
        let mut min_pair = f64::INFINITY;
        for k in 0..=n {
            for grid in [Staggering::Primal, Staggering::Dual] {
                let c = deterministic_noise_cochain(&mesh, k, grid, 7 * k as u64 + n as u64);
                let cc = hodge(&hodge(&c));
                let sign = if (k * (n - k)) % 2 == 0 { 1.0 } else { -1.0 };
                for (a, b) in cc.values.iter().zip(&c.values) {
                    worst = worst.max((a - sign * b).abs() / b.abs().max(1.0));
                }
                let p = pair_complementary(&hodge(&c), &c)?;
                min_pair = min_pair.min(p / c.norm_sq().max(1e-300));
            }
        }
        rows.push(CheckRow {
            name: format!("hodge_involution_{n}d"),
            residual: worst,
            tolerance: 1e-12,
        });
        rows.push(CheckRow {
            name: format!("hodge_positivity_{n}d"),
            residual: (1.0 - min_pair).abs(),
            tolerance: 1e-12,
        });
    }
    Ok(rows)
}

/// Coboundary and Stokes battery: `dd = 0` and the exact telescoping of the
/// boundary trace, per dimension.
pub fn stokes_battery() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for mesh in battery_meshes() {
        let n = mesh.dim();
        // exact integer statement: signed incidence applied twice vanishes
        let mut dd_worst = 0.0_f64;
        for k2 in 2..=n {
            for (_, id) in mesh.cells(k2) {
                let mut acc = std::collections::HashMap::new();
                for (face, s1) in mesh.boundary_of(k2, &id) {
                    for (edge, s2) in mesh.boundary_of(k2 - 1, &face) {
                        *acc.entry(mesh.cell_index(k2 - 2, &edge)).or_insert(0i64) +=
                            (s1 * s2) as i64;
                    }
                }
                for (_, v) in acc {
                    dd_worst = dd_worst.max(v.unsigned_abs() as f64);
                }
            }
        }
        let c = deterministic_noise_cochain(&mesh, n - 1, Staggering::Primal, 17);
        let lhs = crate::forms::integrate_top(&exterior_derivative(&c)?)?;
        let rhs = trace_boundary(&c)?.total();
        rows.push(CheckRow {
            name: format!("coboundary_squared_{n}d"),
            residual: dd_worst,
            tolerance: 0.0,
        });
        rows.push(CheckRow {
            name: format!("stokes_theorem_{n}d"),
            residual: (lhs - rhs).abs() / lhs.abs().max(1.0),
            tolerance: 1e-13,
        });
    }
    Ok(rows)
}

fn mesh_for_signature(sig: Signature) -> Arc<Mesh> {
    match sig.n {
        1 => Mesh::new(1, &[32], &[1.0]).expect("valid"),
        2 => Mesh::new(2, &[8, 8], &[1.0, 1.0]).expect("valid"),
        _ => Mesh::new(3, &[4, 4, 4], &[1.0, 1.0, 1.0]).expect("valid"),
    }
}

/// Stokes-Dirac battery: isotropy of image pairs per signature, plus the
/// dense dimension count on a tiny 1-d mesh.
pub fn dirac_battery() -> Result<Vec<CheckRow>> {
    dirac_battery_with_pairs(20)
}

pub fn dirac_battery_with_pairs(pairs: u64) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for sig in implemented_signatures() {
        let mesh = mesh_for_signature(sig);
        let mut worst = 0.0_f64;
        for seed in 0..pairs {
            let e_p1 = deterministic_noise_cochain(&mesh, sig.n - sig.p, Staggering::Primal, seed);
            let e_q1 =
                deterministic_noise_cochain(&mesh, sig.n - sig.q, Staggering::Dual, seed + 1000);
            let e_p2 = deterministic_noise_cochain(
                &mesh,
                sig.n - sig.p,
                Staggering::Primal,
                seed + 2000,
            );
            let e_q2 =
                deterministic_noise_cochain(&mesh, sig.n - sig.q, Staggering::Dual, seed + 3000);
            worst = worst.max(check_isotropy(&e_p1, &e_q1, &e_p2, &e_q2, sig)?);
        }
        rows.push(CheckRow {
            name: format!("dirac_isotropy_n{}p{}q{}", sig.n, sig.p, sig.q),
            residual: worst,
            tolerance: 1e-10,
        });
    }
    let mesh = Mesh::new(1, &[8], &[1.0])?;
    let (dim_d, dim_ann, total) = dimension_count(&mesh, Signature::new(1, 1, 1)?)?;
    rows.push(CheckRow {
        name: "dirac_dimension_count_1d".into(),
        residual: (dim_d + dim_ann) as f64 - total as f64,
        tolerance: 0.0,
    });
    Ok(rows)
}

struct RandomPolyH {
    cx: [f64; 2],
    cy: [f64; 2],
    cz: f64,
    cxy: f64,
    cyz: f64,
}

impl FiberHamiltonian for RandomPolyH {
    fn eval(&self, x: &[f64], y: &[f64], z: f64) -> f64 {
        self.cx[0] * x[0] * x[0] + self.cx[1] * x[1]
            + self.cy[0] * y[0]
            + self.cy[1] * y[1] * y[1]
            + self.cz * z * z
            + self.cxy * x[0] * y[1]
            + self.cyz * y[0] * z
    }
    fn grad_x(&self, x: &[f64], y: &[f64], _z: f64) -> Vec<f64> {
        vec![2.0 * self.cx[0] * x[0] + self.cxy * y[1], self.cx[1]]
    }
    fn grad_y(&self, x: &[f64], y: &[f64], z: f64) -> Vec<f64> {
        vec![
            self.cy[0] + self.cyz * z,
            2.0 * self.cy[1] * y[1] + self.cxy * x[0],
        ]
    }
    fn grad_z(&self, _x: &[f64], y: &[f64], z: f64) -> f64 {
        2.0 * self.cz * z + self.cyz * y[0]
    }
}

fn lcg(seed: &mut u64) -> f64 {
    *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    ((*seed >> 33) as f64 / (1u64 << 31) as f64) - 1.0
}

/// Contact-identity battery: `X_h h = (Rh) h`, the restricted-field
/// push-forward structure, the Reeb contract, and `lambda(X_h) = h`.
pub fn contact_battery() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let mut seed = 2024u64;
    let mut worst_xh = 0.0_f64;
    let mut worst_tangency = 0.0_f64;
    for _ in 0..100 {
        let h = RandomPolyH {
            cx: [lcg(&mut seed), lcg(&mut seed)],
            cy: [lcg(&mut seed), lcg(&mut seed)],
            cz: lcg(&mut seed),
            cxy: lcg(&mut seed),
            cyz: lcg(&mut seed),
        };
        let pt = ContactPoint {
            x: vec![lcg(&mut seed), lcg(&mut seed)],
            y: vec![lcg(&mut seed), lcg(&mut seed)],
            z: lcg(&mut seed),
        };
        let f = contact_field(&h, &pt);
        let eps = 1e-6;
        let shift = |s: f64| ContactPoint {
            x: pt.x.iter().zip(&f.x_dot).map(|(a, b)| a + s * b).collect(),
            y: pt.y.iter().zip(&f.y_dot).map(|(a, b)| a + s * b).collect(),
            z: pt.z + s * f.z_dot,
        };
        let (fwd, bwd) = (shift(eps), shift(-eps));
        let dh =
            (h.eval(&fwd.x, &fwd.y, fwd.z) - h.eval(&bwd.x, &bwd.y, bwd.z)) / (2.0 * eps);
        let rh_h = h.grad_z(&pt.x, &pt.y, pt.z) * h.eval(&pt.x, &pt.y, pt.z);
        worst_xh = worst_xh.max((dh - rh_h).abs() / (1.0 + rh_h.abs()));
        let lam = crate::contact::contact_form(&pt, &f);
        worst_tangency =
            worst_tangency.max((lam - h.eval(&pt.x, &pt.y, pt.z)).abs() / (1.0 + lam.abs()));
    }
    rows.push(CheckRow {
        name: "contact_xh_identity".into(),
        residual: worst_xh,
        tolerance: 1e-8,
    });
    rows.push(CheckRow {
        name: "contact_lambda_of_field_is_h".into(),
        residual: worst_tangency,
        tolerance: 1e-13,
    });

    let psi = AxisPoly {
        coeffs: vec![vec![0.0, 0.0, 0.5, 0.0, 0.25], vec![0.0, 0.0, 0.3, 0.0, 0.05]],
    };
    let mut worst_structure = 0.0_f64;
    for _ in 0..50 {
        let x = [lcg(&mut seed), lcg(&mut seed)];
        let pt = legendre_point(&psi, &x);
        let drift = [lcg(&mut seed), lcg(&mut seed)];
        let f = contact::restricted_field(&psi, &drift, 1.0, &pt)?;
        let h = psi.hess(&x);
        let g = psi.grad(&x);
        for a in 0..2 {
            let hx: f64 = (0..2).map(|b| h[a][b] * f.x_dot[b]).sum();
            worst_structure = worst_structure.max((f.y_dot[a] - hx).abs());
        }
        let gx: f64 = g.iter().zip(&f.x_dot).map(|(u, v)| u * v).sum();
        worst_structure = worst_structure.max((f.z_dot - gx).abs());
    }
    rows.push(CheckRow {
        name: "contact_restricted_structure".into(),
        residual: worst_structure,
        tolerance: 1e-12,
    });

    let mut worst_reeb = 0.0_f64;
    for _ in 0..20 {
        let pt = ContactPoint {
            x: vec![lcg(&mut seed), lcg(&mut seed)],
            y: vec![lcg(&mut seed), lcg(&mut seed)],
            z: lcg(&mut seed),
        };
        let r = crate::contact::reeb_field(2);
        worst_reeb = worst_reeb.max((crate::contact::contact_form(&pt, &r) - 1.0).abs());
        let v = crate::contact::Tangent {
            x_dot: vec![lcg(&mut seed), lcg(&mut seed)],
            y_dot: vec![lcg(&mut seed), lcg(&mut seed)],
            z_dot: lcg(&mut seed),
        };
        worst_reeb = worst_reeb.max(crate::contact::d_contact_form(&r, &v).abs());
    }
    rows.push(CheckRow {
        name: "contact_reeb_contract".into(),
        residual: worst_reeb,
        tolerance: 0.0,
    });
    Ok(rows)
}

/// Legendre-duality and information-geometry battery.
pub fn infogeo_battery() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let quartic = AxisPoly {
        coeffs: vec![vec![0.0, 0.0, 0.0, 0.0, 0.25]],
    };
    let blended = AxisPoly {
        coeffs: vec![vec![0.0, 0.0, 0.5, 0.0, 0.25]],
    };
    let search = SearchBox::default();

    // biconjugation on quadratic and quartic densities
    let mut worst = 0.0_f64;
    for x in [0.4, 0.9, 1.4] {
        for psi in [&quartic, &blended] {
            let y = psi.grad(&[x]);
            let phi = legendre_transform(psi, &y, &search)?;
            let psi_cc = x * y[0] - phi.value;
            worst = worst.max((psi_cc - psi.eval(&[x])).abs());
        }
    }
    rows.push(CheckRow {
        name: "legendre_biconjugation".into(),
        residual: worst,
        tolerance: 1e-9,
    });

    // grad phi . grad psi = id
    let mut worst = 0.0_f64;
    let dense = QuadraticFormPlusQuartic {
        a: vec![vec![1.2, 0.3], vec![0.3, 0.9]],
        q: vec![0.1, 0.2],
    };
    for x in [[0.4, -0.7], [1.1, 0.2], [-0.6, -0.9]] {
        let y = dense.grad(&x);
        let r = legendre_transform(&dense, &y, &search)?;
        for (m, v) in r.maximizer.iter().zip(&x) {
            worst = worst.max((m - v).abs());
        }
    }
    rows.push(CheckRow {
        name: "legendre_gradient_inverse".into(),
        residual: worst,
        tolerance: 1e-10,
    });

    // Hessian product identity on quadratic and quartic
    let mut worst = 0.0_f64;
    let unit2 = Quadratic::unit(2);
    worst = worst.max(duality_pairing_check(&unit2, &[0.7, -0.4], &search)?);
    worst = worst.max(duality_pairing_check(&blended, &[1.0], &search)?);
    rows.push(CheckRow {
        name: "hessian_product_identity".into(),
        residual: worst,
        tolerance: 1e-10,
    });

    let mut worst = 0.0_f64;
    worst = worst.max(duality_pairing_check(&dense, &[0.5, 0.8], &search)?);
    rows.push(CheckRow {
        name: "duality_pairing".into(),
        residual: worst,
        tolerance: 1e-8,
    });

    // alpha-connection identity, analytic third derivative against central
    // differences of the metric (exact for these polynomial densities)
    let mut worst = 0.0_f64;
    for alpha in [0.0, 0.7] {
        let x = [1.0];
        let gp = alpha_connection(&blended, &x, alpha);
        let gm = alpha_connection(&blended, &x, -alpha);
        let h = 1e-3;
        let g_plus = fiber_metric(&blended, &[x[0] + h]);
        let g_minus = fiber_metric(&blended, &[x[0] - h]);
        let dg = (g_plus[0][0] - g_minus[0][0]) / (2.0 * h);
        worst = worst.max((dg - (gp[0][0][0] + gm[0][0][0])).abs());
    }
    rows.push(CheckRow {
        name: "alpha_connection_identity".into(),
        residual: worst,
        tolerance: 1e-10,
    });

    // divergence nonnegativity over 1000 sampled pairs
    let chart = DuallyFlatChart::new(&dense);
    let mut seed = 99u64;
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let a = [lcg(&mut seed), lcg(&mut seed)];
        let b = [lcg(&mut seed), lcg(&mut seed)];
        let d = canonical_divergence(&chart, &a, &b);
        worst = worst.max(-d);
        worst = worst.max(canonical_divergence(&chart, &a, &a).abs());
    }
    rows.push(CheckRow {
        name: "divergence_nonnegative".into(),
        residual: worst.max(0.0),
        tolerance: 1e-12,
    });

    // Pythagorean corners: quadratic closed form and quartic separable
    let unit = Quadratic::unit(2);
    let chart_q = DuallyFlatChart::new(&unit);
    let r_quad = pythagoras_check(&chart_q, &[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0])?;
    let d31 = canonical_divergence(&chart_q, &[1.0, 1.0], &[0.0, 0.0]);
    rows.push(CheckRow {
        name: "pythagoras_quadratic".into(),
        residual: r_quad.max((d31 - 1.0).abs()),
        tolerance: 1e-10,
    });
    let sep = AxisPoly {
        coeffs: vec![
            vec![0.0, 0.0, 0.5, 0.0, 0.25],
            vec![0.0, 0.0, 0.5, 0.0, 0.1],
        ],
    };
    let chart_s = DuallyFlatChart::new(&sep);
    let r_sep = pythagoras_check(&chart_s, &[0.2, 0.5], &[1.0, 0.5], &[1.0, 1.3])?;
    rows.push(CheckRow {
        name: "pythagoras_quartic_separable".into(),
        residual: r_sep,
        tolerance: 1e-9,
    });
    Ok(rows)
}

/// Build the infogeo report for a scenario config without running the
/// simulation (the `infogeo` subcommand).
pub fn infogeo_report(cfg: &ScenarioConfig, out_override: Option<&Path>) -> Result<Vec<CheckRow>> {
    let out_dir = out_override.unwrap_or(&cfg.out_dir).to_path_buf();
    std::fs::create_dir_all(&out_dir)?;
    let sig = cfg.preset.signature();
    let (np, nq) = contact::fiber_blocks(sig);
    let dim = np + nq;
    let psi = Quadratic::unit(dim);
    let chart = DuallyFlatChart::new(&psi);
    let mut csv = String::from("xi,xi_prime,D\n");
    for i in 0..8 {
        for j in 0..8 {
            let a: Vec<f64> = (0..dim).map(|k| ((i * dim + k) as f64 * 0.31).sin()).collect();
            let b: Vec<f64> = (0..dim).map(|k| ((j * dim + k) as f64 * 0.53).cos()).collect();
            let d = canonical_divergence(&chart, &a, &b);
            let _ = writeln!(csv, "{},{},{}", join_components(&a), join_components(&b), fmt(d));
        }
    }
    std::fs::write(out_dir.join("divergences.csv"), csv)?;
    infogeo_battery()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn batteries_pass() {
        for suite in [Suite::Hodge, Suite::Stokes, Suite::Contact, Suite::Infogeo] {
            for row in verify_suite(suite).unwrap() {
                assert!(row.pass(), "{}", row.line());
            }
        }
    }

    #[test]
    fn hodge_battery_has_six_rows() {
        assert_eq!(hodge_battery().unwrap().len(), 6);
    }

    #[test]
    fn unknown_suite_errors() {
        assert!(Suite::parse("foo").is_err());
        assert!(Suite::parse("hodge").is_ok());
    }

    #[test]
    fn run_writes_series_and_passes() {
        let cfg = parse_config(
            "[run]\npreset = telegraph1d\ndt = 0.003\nsteps = 40\n[mesh]\ncells = 32\n",
        )
        .unwrap();
        let dir = std::env::temp_dir().join(format!("dirac_lab_test_{}", std::process::id()));
        let outcome = run(&cfg, Some(&dir)).unwrap();
        assert!(outcome.verification_ok());
        let series = std::fs::read_to_string(dir.join("series.csv")).unwrap();
        assert_eq!(series.lines().count(), 41); // header + one row per step
        assert!(dir.join("alpha_p_40.coch").exists());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn corrupted_effort_fails_verification() {
        let cfg = parse_config(
            "[run]\npreset = telegraph1d\ndt = 0.003\nsteps = 10\n[mesh]\ncells = 16\n[debug]\ncorrupt_effort = 0.001\n",
        )
        .unwrap();
        let dir = std::env::temp_dir().join(format!("dirac_lab_fault_{}", std::process::id()));
        let outcome = run(&cfg, Some(&dir)).unwrap();
        assert!(!outcome.verification_ok());
        std::fs::remove_dir_all(&dir).ok();
    }
}
