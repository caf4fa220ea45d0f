//! Canonical contact geometry on fibers and the per-cell contact lift.
//!
//! The fiber over each n-cell carries canonical coordinates `(x, y, z)` with
//! contact form `lambda = dz - y_a dx^a`; the Reeb field is `d/dz`. A state
//! of the simulator lifts cell by cell: `x` holds the energy-variable
//! coframe components, `y` the effort components (with the per-signature
//! Hodge placements), and `z` the energy density value. The lifted points
//! sit on the Legendre submanifold generated by the energy density, and the
//! evolution is the restricted contact Hamiltonian vector field of
//! `h = Delta_a F^a + Gamma(Delta_0)`, with the drift `F` assembled from the
//! discrete derivative of the efforts. `verify_lift` checks exactly that,
//! component by component and cell by cell.

use crate::density::Density;
use crate::error::{Error, Result};
use crate::exterior;
use crate::forms::{hodge, to_point_field, Cochain, PointField};
use crate::phs::{rhs_from_efforts, effort, BoundaryMode, EnergySpec, PHSState};
use crate::stokes_dirac::Signature;

/// A point of a `(2 n~ + 1)`-dimensional fiber in canonical coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: f64,
}

/// Tangent components of a fiber vector field at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Tangent {
    pub x_dot: Vec<f64>,
    pub y_dot: Vec<f64>,
    pub z_dot: f64,
}

/// Values of the adapted functions `Delta_0 = psi - z`,
/// `Delta_a = d psi/dx^a - y_a`; all vanish exactly on the Legendre
/// submanifold generated by `psi`.
#[derive(Debug, Clone)]
pub struct AdaptedValues {
    pub delta0: f64,
    pub delta: Vec<f64>,
}

impl AdaptedValues {
    pub fn max_abs(&self) -> f64 {
        self.delta
            .iter()
            .fold(self.delta0.abs(), |m, v| m.max(v.abs()))
    }
}

/// A contact Hamiltonian with analytic fiber gradients.
pub trait FiberHamiltonian {
    fn eval(&self, x: &[f64], y: &[f64], z: f64) -> f64;
    fn grad_x(&self, x: &[f64], y: &[f64], z: f64) -> Vec<f64>;
    fn grad_y(&self, x: &[f64], y: &[f64], z: f64) -> Vec<f64>;
    fn grad_z(&self, x: &[f64], y: &[f64], z: f64) -> f64;
}

/// Canonical-coordinate contact Hamiltonian vector field:
/// `x' = -dh/dy`, `y' = dh/dx + y dh/dz`, `z' = h - y . dh/dy`.
pub fn contact_field(h: &dyn FiberHamiltonian, pt: &ContactPoint) -> Tangent {
    let gy = h.grad_y(&pt.x, &pt.y, pt.z);
    let gx = h.grad_x(&pt.x, &pt.y, pt.z);
    let gz = h.grad_z(&pt.x, &pt.y, pt.z);
    let value = h.eval(&pt.x, &pt.y, pt.z);
    let x_dot: Vec<f64> = gy.iter().map(|v| -v).collect();
    let y_dot: Vec<f64> = gx.iter().zip(&pt.y).map(|(a, y)| a + y * gz).collect();
    let z_dot = value - pt.y.iter().zip(&gy).map(|(y, g)| y * g).sum::<f64>();
    Tangent { x_dot, y_dot, z_dot }
}

/// `lambda(v) = v_z - y . v_x` at a point.
pub fn contact_form(pt: &ContactPoint, v: &Tangent) -> f64 {
    v.z_dot - pt.y.iter().zip(&v.x_dot).map(|(y, x)| y * x).sum::<f64>()
}

/// `d lambda(u, v) = sum_a (u_x^a v_y_a - u_y_a v_x^a)`.
pub fn d_contact_form(u: &Tangent, v: &Tangent) -> f64 {
    u.x_dot
        .iter()
        .zip(&u.y_dot)
        .zip(v.x_dot.iter().zip(&v.y_dot))
        .map(|((ux, uy), (vx, vy))| ux * vy - uy * vx)
        .sum()
}

/// The Reeb field `(0, ..., 0, 1)`.
pub fn reeb_field(dim: usize) -> Tangent {
    Tangent {
        x_dot: vec![0.0; dim],
        y_dot: vec![0.0; dim],
        z_dot: 1.0,
    }
}

/// Embed `x` on the Legendre submanifold generated by `psi`:
/// `y = grad psi(x)`, `z = psi(x)`.
pub fn legendre_point(psi: &dyn Density, x: &[f64]) -> ContactPoint {
    ContactPoint {
        x: x.to_vec(),
        y: psi.grad(x),
        z: psi.eval(x),
    }
}

/// Embed `y` on the Legendre submanifold generated by `-phi`:
/// `x = grad phi(y)`, `z = y . grad phi(y) - phi(y)`.
pub fn legendre_point_dual(phi: &dyn Density, y: &[f64]) -> ContactPoint {
    let gx = phi.grad(y);
    let z = y.iter().zip(&gx).map(|(a, b)| a * b).sum::<f64>() - phi.eval(y);
    ContactPoint {
        x: gx,
        y: y.to_vec(),
        z,
    }
}

/// Evaluate the adapted functions of `psi` at a point.
pub fn adapted_values(pt: &ContactPoint, psi: &dyn Density) -> AdaptedValues {
    let g = psi.grad(&pt.x);
    AdaptedValues {
        delta0: psi.eval(&pt.x) - pt.z,
        delta: g.iter().zip(&pt.y).map(|(a, y)| a - y).collect(),
    }
}

/// Dual adapted functions of `phi`:
/// `Delta^0 = x . y - phi(y) - z`, `Delta^a = x^a - d phi/dy_a`.
pub fn adapted_values_dual(pt: &ContactPoint, phi: &dyn Density) -> AdaptedValues {
    let g = phi.grad(&pt.y);
    let xy: f64 = pt.x.iter().zip(&pt.y).map(|(a, b)| a * b).sum();
    AdaptedValues {
        delta0: xy - phi.eval(&pt.y) - pt.z,
        delta: pt.x.iter().zip(&g).map(|(x, d)| x - d).collect(),
    }
}

/// `h = Delta_a F^a + Gamma(Delta_0)` with `Gamma(u) = kappa u`: the contact
/// Hamiltonian whose restriction to the Legendre submanifold of `psi` has
/// drift `x' = F`.
pub struct RestrictedHamiltonian<'a> {
    pub psi: &'a dyn Density,
    pub drift: &'a [f64],
    pub kappa: f64,
}

impl FiberHamiltonian for RestrictedHamiltonian<'_> {
    fn eval(&self, x: &[f64], y: &[f64], z: f64) -> f64 {
        let g = self.psi.grad(x);
        let delta_term: f64 = g
            .iter()
            .zip(y)
            .zip(self.drift)
            .map(|((ga, ya), fa)| (ga - ya) * fa)
            .sum();
        delta_term + self.kappa * (self.psi.eval(x) - z)
    }
    fn grad_x(&self, x: &[f64], _y: &[f64], _z: f64) -> Vec<f64> {
        let h = self.psi.hess(x);
        let g = self.psi.grad(x);
        (0..x.len())
            .map(|a| {
                let hess_f: f64 = (0..x.len()).map(|b| h[a][b] * self.drift[b]).sum();
                hess_f + self.kappa * g[a]
            })
            .collect()
    }
    fn grad_y(&self, _x: &[f64], _y: &[f64], _z: f64) -> Vec<f64> {
        self.drift.iter().map(|f| -f).collect()
    }
    fn grad_z(&self, _x: &[f64], _y: &[f64], _z: f64) -> f64 {
        -self.kappa
    }
}

/// Dual counterpart: `h = Delta^a F_a + Gamma(Delta^0)` over the submanifold
/// generated by `-phi`, with drift `y' = F`.
pub struct RestrictedHamiltonianDual<'a> {
    pub phi: &'a dyn Density,
    pub drift: &'a [f64],
    pub kappa: f64,
}

impl FiberHamiltonian for RestrictedHamiltonianDual<'_> {
    fn eval(&self, x: &[f64], y: &[f64], z: f64) -> f64 {
        let g = self.phi.grad(y);
        let delta_term: f64 = x
            .iter()
            .zip(&g)
            .zip(self.drift)
            .map(|((xa, ga), fa)| (xa - ga) * fa)
            .sum();
        let xy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        delta_term + self.kappa * (xy - self.phi.eval(y) - z)
    }
    fn grad_x(&self, _x: &[f64], y: &[f64], _z: f64) -> Vec<f64> {
        self.drift
            .iter()
            .zip(y)
            .map(|(f, ya)| f + self.kappa * ya)
            .collect()
    }
    fn grad_y(&self, x: &[f64], y: &[f64], _z: f64) -> Vec<f64> {
        let h = self.phi.hess(y);
        let g = self.phi.grad(y);
        (0..y.len())
            .map(|a| {
                let hess_f: f64 = (0..y.len()).map(|b| h[a][b] * self.drift[b]).sum();
                -hess_f + self.kappa * (x[a] - g[a])
            })
            .collect()
    }
    fn grad_z(&self, _x: &[f64], _y: &[f64], _z: f64) -> f64 {
        -self.kappa
    }
}

const ON_SUBMANIFOLD_TOL: f64 = 1e-9;

fn submanifold_scale(pt: &ContactPoint) -> f64 {
    1.0 + pt.z.abs()
        + pt.y.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
        + pt.x.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Restricted contact Hamiltonian vector field on the submanifold of `psi`:
/// `x' = F`, `y' = Hess psi . F`, `z' = grad psi . F`. Errors off the
/// submanifold.
pub fn restricted_field(
    psi: &dyn Density,
    drift: &[f64],
    kappa: f64,
    pt: &ContactPoint,
) -> Result<Tangent> {
    let res = adapted_values(pt, psi).max_abs();
    if res > ON_SUBMANIFOLD_TOL * submanifold_scale(pt) {
        return Err(Error::OffSubmanifold(res));
    }
    let h = RestrictedHamiltonian { psi, drift, kappa };
    Ok(contact_field(&h, pt))
}

/// Restricted field over the submanifold generated by `-phi`:
/// `y' = F`, `x' = Hess phi . F`, `z' = y . Hess phi . F`.
pub fn restricted_field_dual(
    phi: &dyn Density,
    drift: &[f64],
    kappa: f64,
    pt: &ContactPoint,
) -> Result<Tangent> {
    let res = adapted_values_dual(pt, phi).max_abs();
    if res > ON_SUBMANIFOLD_TOL * submanifold_scale(pt) {
        return Err(Error::OffSubmanifold(res));
    }
    let h = RestrictedHamiltonianDual { phi, drift, kappa };
    Ok(contact_field(&h, pt))
}

/// Fiber dimension blocks for a signature: `(C(n,p), C(n,q))`.
pub fn fiber_blocks(sig: Signature) -> (usize, usize) {
    (
        exterior::comp_count(sig.n, sig.p),
        exterior::comp_count(sig.n, sig.q),
    )
}

/// An energy spec viewed as a density on the fiber coordinates.
pub struct FiberSpec<'a> {
    pub spec: &'a EnergySpec,
    pub np: usize,
    pub dim: usize,
}

impl FiberSpec<'_> {
    pub fn new(spec: &EnergySpec, sig: Signature) -> FiberSpec<'_> {
        let (np, nq) = fiber_blocks(sig);
        FiberSpec {
            spec,
            np,
            dim: np + nq,
        }
    }
}

impl Density for FiberSpec<'_> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64]) -> f64 {
        self.spec.psi(x, self.np)
    }
    fn grad(&self, x: &[f64]) -> Vec<f64> {
        self.spec.grad_psi(x, self.np)
    }
    fn hess(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let d = self.spec.hess_psi_diag(x, self.np);
        let n = x.len();
        let mut h = vec![vec![0.0; n]; n];
        for i in 0..n {
            h[i][i] = d[i];
        }
        h
    }
    fn third(&self, x: &[f64], a: usize, b: usize, c: usize) -> f64 {
        match self.spec {
            EnergySpec::Quadratic { .. } => 0.0,
            EnergySpec::PointwiseDensity(d) => {
                if a == b && b == c {
                    if a == 0 {
                        24.0 * d.c4_p * x[0]
                    } else {
                        24.0 * d.c4_q * x[1]
                    }
                } else {
                    0.0
                }
            }
        }
    }
}

/// Per-signature placement of the energy-variable coordinates: the cochains
/// whose cell-center components form the `x` blocks. The same placement
/// applied to the right-hand side gives the `x'` blocks. The starred blocks
/// carry the same wedge parity as the efforts, so `y = x` holds on the
/// phase space in every case.
fn x_block_cochains(sig: Signature, a_p: &Cochain, a_q: &Cochain) -> (Cochain, Cochain) {
    let par = |k: usize| -> f64 {
        if (k * (sig.n - k)) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    match (sig.n, sig.p, sig.q) {
        // x_(p) are the components of alpha_p itself; everywhere else the
        // coordinates are the starred components.
        (3, 1, 3) => (a_p.clone(), hodge(a_q).scaled(par(sig.q))),
        _ => (
            hodge(a_p).scaled(par(sig.p)),
            hodge(a_q).scaled(par(sig.q)),
        ),
    }
}

/// Per-signature placement of the effort coordinates forming the `y` blocks.
fn y_block_cochains(sig: Signature, e_p: &Cochain, e_q: &Cochain) -> (Cochain, Cochain) {
    match (sig.n, sig.p, sig.q) {
        // y^(p) = (star e_p)_a; all other cases read components directly.
        (3, 1, 3) => (hodge(e_p), e_q.clone()),
        _ => (e_p.clone(), e_q.clone()),
    }
}

fn concat_comps(fp: &PointField, fq: &PointField, cell: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(fp.comps[cell].len() + fq.comps[cell].len());
    v.extend_from_slice(&fp.comps[cell]);
    v.extend_from_slice(&fq.comps[cell]);
    v
}

/// Lift a state into per-cell contact points: `x` from the energy cochains,
/// `y` from the efforts, `z = psi(x)`.
pub fn lift_state(state: &PHSState, spec: &EnergySpec) -> Result<Vec<ContactPoint>> {
    let sig = state.signature;
    check_supported(sig)?;
    let (e_p, e_q) = effort(state, spec)?;
    let (xs_p, xs_q) = x_block_cochains(sig, &state.alpha_p, &state.alpha_q);
    let (ys_p, ys_q) = y_block_cochains(sig, &e_p, &e_q);
    let xp = to_point_field(&xs_p);
    let xq = to_point_field(&xs_q);
    let yp = to_point_field(&ys_p);
    let yq = to_point_field(&ys_q);
    let (np, _) = fiber_blocks(sig);
    let ncells = state.mesh().cell_count(sig.n);
    let pts = crate::parallel::map_indexed(ncells, |ci| {
        let x = concat_comps(&xp, &xq, ci);
        let y = concat_comps(&yp, &yq, ci);
        let z = spec.psi(&x, np);
        ContactPoint { x, y, z }
    });
    Ok(pts)
}

fn check_supported(sig: Signature) -> Result<()> {
    let ok = matches!(
        (sig.n, sig.p, sig.q),
        (1, 1, 1) | (2, 1, 2) | (3, 2, 2) | (3, 1, 3)
    );
    if ok {
        Ok(())
    } else {
        Err(Error::UnsupportedSignature {
            n: sig.n,
            p: sig.p,
            q: sig.q,
        })
    }
}

/// Per-cell drift components `F^a = x'^a`, assembled from the discrete
/// derivative of the efforts through the structure relations and the same
/// coordinate placements as the lift.
fn drift_components(
    state: &PHSState,
    e_p: &Cochain,
    e_q: &Cochain,
    mode: BoundaryMode,
) -> Result<(PointField, PointField)> {
    let sig = state.signature;
    let (rp, rq) = rhs_from_efforts(sig, e_p, e_q, mode)?;
    let (dp, dq) = x_block_cochains(sig, &rp, &rq);
    Ok((to_point_field(&dp), to_point_field(&dq)))
}

/// Evaluate the contact Hamiltonian density `h_psi` at every cell of a
/// lifted state; vanishes identically on the phase space.
pub fn contact_hamiltonian_density(
    state: &PHSState,
    spec: &EnergySpec,
    mode: BoundaryMode,
    kappa: f64,
) -> Result<Vec<f64>> {
    let sig = state.signature;
    let pts = lift_state(state, spec)?;
    let (e_p, e_q) = effort(state, spec)?;
    let (fp, fq) = drift_components(state, &e_p, &e_q, mode)?;
    let fiber = FiberSpec::new(spec, sig);
    Ok(pts
        .iter()
        .enumerate()
        .map(|(ci, pt)| {
            let drift = concat_comps(&fp, &fq, ci);
            let h = RestrictedHamiltonian {
                psi: &fiber,
                drift: &drift,
                kappa,
            };
            h.eval(&pt.x, &pt.y, pt.z)
        })
        .collect())
}

/// One cell's residual row from `verify_lift`.
#[derive(Debug, Clone, Copy)]
pub struct LiftRow {
    pub cell: usize,
    pub res_x: f64,
    pub res_y: f64,
    pub res_z: f64,
    pub h_psi: f64,
}

/// Aggregated residuals of the contact-lift verification.
#[derive(Debug, Clone)]
pub struct LiftReport {
    pub rows: Vec<LiftRow>,
    pub max_res_x: f64,
    pub max_res_y: f64,
    pub max_res_z: f64,
    pub max_h: f64,
}

/// Verify, cell by cell, that the lifted simulator dynamics is the
/// restricted contact Hamiltonian vertical vector field:
///
/// * `x'` blocks of the contact field against the components of the
///   simulator right-hand side,
/// * `y'` blocks against the time derivative of the effort components,
/// * `z'` against `-star(e_p ^ F_p + e_q ^ F_q)` assembled independently
///   through the pointwise exterior algebra,
/// * the value of `h_psi`, which must vanish on the phase space.
pub fn verify_lift(
    state: &PHSState,
    spec: &EnergySpec,
    mode: BoundaryMode,
    kappa: f64,
) -> Result<LiftReport> {
    verify_lift_with_effort_fault(state, spec, mode, kappa, 0.0)
}

/// Fault-injection variant of [`verify_lift`]: offsets the first effort
/// coordinate of every lifted point by `y_fault` before checking, so a
/// nonzero value must trip the residuals. Exists for exercising the
/// verification failure path.
pub fn verify_lift_with_effort_fault(
    state: &PHSState,
    spec: &EnergySpec,
    mode: BoundaryMode,
    kappa: f64,
    y_fault: f64,
) -> Result<LiftReport> {
    let sig = state.signature;
    let mut pts = lift_state(state, spec)?;
    if y_fault != 0.0 {
        for pt in &mut pts {
            pt.y[0] += y_fault;
        }
    }
    let (e_p, e_q) = effort(state, spec)?;
    let (rp, rq) = rhs_from_efforts(sig, &e_p, &e_q, mode)?;

    // x' reference: rhs through the x-coordinate placement
    let (dxp_c, dxq_c) = x_block_cochains(sig, &rp, &rq);
    let dxp = to_point_field(&dxp_c);
    let dxq = to_point_field(&dxq_c);

    // drift for h: the theorem's F fields, starred like the coordinates;
    // F = -d alpha/dt, and the drift of the restricted field is x' = -F~
    let f_p_cochain = rp.scaled(-1.0);
    let f_q_cochain = rq.scaled(-1.0);

    // y' reference: time derivative of the effort components
    let (dyp, dyq) = match spec {
        EnergySpec::Quadratic { c_p, c_q } => {
            let par = |k: usize| -> f64 {
                if (k * (sig.n - k)) % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            };
            let ep_dot = hodge(&rp).scaled(2.0 * c_p * par(sig.p));
            let eq_dot = hodge(&rq).scaled(2.0 * c_q * par(sig.q));
            let (yp, yq) = y_block_cochains(sig, &ep_dot, &eq_dot);
            (to_point_field(&yp), to_point_field(&yq))
        }
        EnergySpec::PointwiseDensity(d) => {
            // chain rule at the effort slots, then back to centers
            let xp = to_point_field(&state.alpha_p);
            let xq = to_point_field(&state.alpha_q);
            let rp_pf = to_point_field(&rp);
            let rq_pf = to_point_field(&rq);
            let mesh = state.mesh();
            let ncells = mesh.cell_count(1);
            let mut gp = vec![vec![0.0; 1]; ncells];
            let mut gq = vec![vec![0.0; 1]; ncells];
            for ci in 0..ncells {
                let (hp, hq) = d.hess(xp.comps[ci][0], xq.comps[ci][0]);
                gp[ci][0] = hp * rp_pf.comps[ci][0];
                gq[ci][0] = hq * rq_pf.comps[ci][0];
            }
            let ep_dot = crate::forms::from_point_field(
                &PointField {
                    mesh: mesh.clone(),
                    degree: 0,
                    comps: gp,
                },
                0,
                crate::forms::Staggering::Primal,
            )?;
            let eq_dot = crate::forms::from_point_field(
                &PointField {
                    mesh: mesh.clone(),
                    degree: 0,
                    comps: gq,
                },
                0,
                crate::forms::Staggering::Dual,
            )?;
            let (yp, yq) = y_block_cochains(sig, &ep_dot, &eq_dot);
            (to_point_field(&yp), to_point_field(&yq))
        }
    };

    // z' reference: -star(e_p ^ F_p + e_q ^ F_q) through the pointwise
    // exterior algebra, with the discrete-d-generated F cochains
    let ep_pf = to_point_field(&e_p);
    let eq_pf = to_point_field(&e_q);
    let fp_pf = to_point_field(&f_p_cochain);
    let fq_pf = to_point_field(&f_q_cochain);

    let fiber = FiberSpec::new(spec, sig);
    let n = sig.n;
    let ncells = state.mesh().cell_count(n);
    let rows: Vec<LiftRow> = crate::parallel::map_indexed(ncells, |ci| {
        let pt = &pts[ci];
        let drift = {
            let mut v = Vec::with_capacity(pt.x.len());
            v.extend_from_slice(&dxp.comps[ci]);
            v.extend_from_slice(&dxq.comps[ci]);
            v
        };
        let h = RestrictedHamiltonian {
            psi: &fiber,
            drift: &drift,
            kappa,
        };
        let field = contact_field(&h, pt);
        let h_val = h.eval(&pt.x, &pt.y, pt.z);

        let res_x = field
            .x_dot
            .iter()
            .zip(dxp.comps[ci].iter().chain(&dxq.comps[ci]))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let res_y = field
            .y_dot
            .iter()
            .zip(dyp.comps[ci].iter().chain(&dyq.comps[ci]))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);

        let w_p = exterior::wedge(n, n - sig.p, &ep_pf.comps[ci], sig.p, &fp_pf.comps[ci]);
        let w_q = exterior::wedge(n, n - sig.q, &eq_pf.comps[ci], sig.q, &fq_pf.comps[ci]);
        let z_ref = -(w_p[0] + w_q[0]);
        let res_z = (field.z_dot - z_ref).abs();

        LiftRow {
            cell: ci,
            res_x,
            res_y,
            res_z,
            h_psi: h_val,
        }
    });
    let max_res_x = rows.iter().map(|r| r.res_x).fold(0.0, f64::max);
    let max_res_y = rows.iter().map(|r| r.res_y).fold(0.0, f64::max);
    let max_res_z = rows.iter().map(|r| r.res_z).fold(0.0, f64::max);
    let max_h = rows.iter().map(|r| r.h_psi.abs()).fold(0.0, f64::max);
    Ok(LiftReport {
        rows,
        max_res_x,
        max_res_y,
        max_res_z,
        max_h,
    })
}
