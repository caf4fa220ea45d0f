//! The power-conserving interconnection structure with boundary ports.
//!
//! Flow/effort tuples live in `Lambda^p(Z) x Lambda^q(Z) x Lambda^{n-p}(dZ)`
//! and its effort counterpart, with `p + q = n + 1`. The structure relations
//! send a pair of efforts to flows through the exterior derivative and to
//! boundary ports through traces; the bilinear form pairs two tuples with
//! volume and boundary wedge integrals. Because the discrete
//! integration-by-parts identity is exact, the form vanishes on image pairs
//! to rounding, which is the discrete half of the self-orthogonality
//! statement. The other half is replaced by a dense dimension count on tiny
//! meshes.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::forms::{
    boundary_pair, exterior_derivative, exterior_derivative_closed, pair_complementary,
    trace_boundary, BoundaryCochain, Cochain, DualClosure, Staggering,
};
use crate::linalg;
use crate::mesh::Mesh;

/// The `(n, p, q)` triple with `p + q = n + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub n: usize,
    pub p: usize,
    pub q: usize,
}

impl Signature {
    pub fn new(n: usize, p: usize, q: usize) -> Result<Signature> {
        if p + q != n + 1 || p > n || q > n || p == 0 || q == 0 {
            return Err(Error::InvalidSignature { n, p, q });
        }
        Ok(Signature { n, p, q })
    }

    /// The sign exponent of the off-diagonal derivative block.
    pub fn r(&self) -> usize {
        self.p * self.q + 1
    }

    fn r_sign(&self) -> f64 {
        if self.r() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Sign of the boundary effort port relative to the trace of `e_q`.
    /// `-(-1)^{n-q}` and `(-1)^p` agree because `p + q = n + 1`.
    pub fn boundary_effort_sign(&self) -> f64 {
        if self.p % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Anticommutation parity of the boundary wedge `e_b ^ f_b`.
    fn boundary_pair_sign(&self) -> f64 {
        if ((self.p - 1) * (self.n - self.p)) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// A flow/effort tuple, the six legs of one element of the structure.
#[derive(Debug, Clone)]
pub struct FlowEffortTuple {
    pub f_p: Cochain,
    pub f_q: Cochain,
    pub f_bnd: BoundaryCochain,
    pub e_p: Cochain,
    pub e_q: Cochain,
    pub e_bnd: BoundaryCochain,
    pub signature: Signature,
}

/// Check the staggering/degree layout of an effort pair for a signature:
/// `e_p` primal of degree `n-p`, `e_q` dual of degree `n-q`.
fn check_efforts(e_p: &Cochain, e_q: &Cochain, sig: Signature) -> Result<()> {
    if e_p.degree != sig.n - sig.p {
        return Err(Error::DegreeMismatch {
            expected: sig.n - sig.p,
            got: e_p.degree,
        });
    }
    if e_q.degree != sig.n - sig.q {
        return Err(Error::DegreeMismatch {
            expected: sig.n - sig.q,
            got: e_q.degree,
        });
    }
    if e_p.grid != Staggering::Primal || e_q.grid != Staggering::Dual {
        return Err(Error::StaggeringMismatch);
    }
    Ok(())
}

/// Apply the structure relations to an effort pair.
///
/// `f_p = (-1)^r d e_q`, `f_q = d e_p`, `f_bnd = e_p|_dZ`,
/// `e_bnd = -(-1)^{n-q} e_q|_dZ`, with `r = pq + 1`. The derivative of the
/// dual effort is closed with its own trace, so image tuples annihilate the
/// bilinear form exactly.
pub fn structure_map(e_p: &Cochain, e_q: &Cochain, sig: Signature) -> Result<FlowEffortTuple> {
    check_efforts(e_p, e_q, sig)?;
    let tr_q = trace_boundary(e_q)?;
    let f_p = exterior_derivative_closed(e_q, DualClosure::Trace(&tr_q))?.scaled(sig.r_sign());
    let f_q = exterior_derivative(e_p)?;
    let f_bnd = trace_boundary(e_p)?;
    let mut e_bnd = tr_q;
    let s = sig.boundary_effort_sign();
    for wall in &mut e_bnd.values {
        for v in wall.iter_mut() {
            *v *= s;
        }
    }
    Ok(FlowEffortTuple {
        f_p,
        f_q,
        f_bnd,
        e_p: e_p.clone(),
        e_q: e_q.clone(),
        e_bnd,
        signature: sig,
    })
}

/// The symmetric bilinear form
/// `int e_p ^ f_p' + e_q ^ f_q' + (swap) + int_dZ e_b ^ f_b' + (swap)`.
pub fn bilinear_form(t1: &FlowEffortTuple, t2: &FlowEffortTuple) -> Result<f64> {
    if t1.signature != t2.signature {
        return Err(Error::InvalidSignature {
            n: t2.signature.n,
            p: t2.signature.p,
            q: t2.signature.q,
        });
    }
    let volume = pair_complementary(&t2.f_p, &t1.e_p)?
        + pair_complementary(&t2.f_q, &t1.e_q)?
        + pair_complementary(&t1.f_p, &t2.e_p)?
        + pair_complementary(&t1.f_q, &t2.e_q)?;
    let bs = t1.signature.boundary_pair_sign();
    let boundary = bs
        * (boundary_pair(&t2.f_bnd, &t1.e_bnd)? + boundary_pair(&t1.f_bnd, &t2.e_bnd)?);
    Ok(volume + boundary)
}

fn tuple_norm_sq(t: &FlowEffortTuple) -> f64 {
    t.f_p.norm_sq()
        + t.f_q.norm_sq()
        + t.e_p.norm_sq()
        + t.e_q.norm_sq()
        + t.f_bnd.norm_sq()
        + t.e_bnd.norm_sq()
}

/// Normalized bilinear-form residual of the two image tuples built from the
/// given effort pairs; certifies `D` is contained in its own orthogonal
/// complement on this discretization.
pub fn check_isotropy(
    e_p1: &Cochain,
    e_q1: &Cochain,
    e_p2: &Cochain,
    e_q2: &Cochain,
    sig: Signature,
) -> Result<f64> {
    let t1 = structure_map(e_p1, e_q1, sig)?;
    let t2 = structure_map(e_p2, e_q2, sig)?;
    let b = bilinear_form(&t1, &t2)?;
    let scale = (tuple_norm_sq(&t1) * tuple_norm_sq(&t2)).sqrt();
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(b.abs() / scale)
}

/// Flatten a tuple into one coordinate vector of the full tuple space.
fn tuple_coords(t: &FlowEffortTuple) -> Vec<f64> {
    let mut out = Vec::new();
    out.extend_from_slice(&t.f_p.values);
    out.extend_from_slice(&t.f_q.values);
    for w in &t.f_bnd.values {
        out.extend_from_slice(w);
    }
    out.extend_from_slice(&t.e_p.values);
    out.extend_from_slice(&t.e_q.values);
    for w in &t.e_bnd.values {
        out.extend_from_slice(w);
    }
    out
}

/// Desk-scale stand-in for the maximality half of self-orthogonality:
/// on a tiny mesh, `dim(D) + dim(annihilator of D under the bilinear form)`
/// must equal the dimension of the full tuple space.
pub fn dimension_count(mesh: &Arc<Mesh>, sig: Signature) -> Result<(usize, usize, usize)> {
    // Basis tuples of V: vary each coordinate of each leg independently.
    let zero_tuple = |sig: Signature| -> Result<FlowEffortTuple> {
        let e_p = Cochain::zeros(mesh, sig.n - sig.p, Staggering::Primal)?;
        let e_q = Cochain::zeros(mesh, sig.n - sig.q, Staggering::Dual)?;
        let mut t = structure_map(&e_p, &e_q, sig)?;
        for v in &mut t.f_p.values {
            *v = 0.0;
        }
        for v in &mut t.f_q.values {
            *v = 0.0;
        }
        for w in &mut t.f_bnd.values {
            for v in w.iter_mut() {
                *v = 0.0;
            }
        }
        for w in &mut t.e_bnd.values {
            for v in w.iter_mut() {
                *v = 0.0;
            }
        }
        Ok(t)
    };
    let template = zero_tuple(sig)?;
    let total_dim = tuple_coords(&template).len();

    // Basis of D: image tuples of unit effort inputs.
    let n_ep = template.e_p.values.len();
    let n_eq = template.e_q.values.len();
    let mut d_basis: Vec<FlowEffortTuple> = Vec::with_capacity(n_ep + n_eq);
    for i in 0..n_ep + n_eq {
        let mut e_p = Cochain::zeros(mesh, sig.n - sig.p, Staggering::Primal)?;
        let mut e_q = Cochain::zeros(mesh, sig.n - sig.q, Staggering::Dual)?;
        if i < n_ep {
            e_p.values[i] = 1.0;
        } else {
            e_q.values[i - n_ep] = 1.0;
        }
        d_basis.push(structure_map(&e_p, &e_q, sig)?);
    }
    let d_matrix: Vec<Vec<f64>> = d_basis.iter().map(tuple_coords).collect();
    let dim_d = linalg::rank(&d_matrix, 1e-10);

    // Annihilator of D: null space of the pairing of D-basis against the
    // coordinate basis of V.
    let mut pairing_rows: Vec<Vec<f64>> = Vec::with_capacity(d_basis.len());
    for d in &d_basis {
        let mut row = Vec::with_capacity(total_dim);
        for j in 0..total_dim {
            let mut basis = template.clone();
            set_coord(&mut basis, j, 1.0);
            row.push(bilinear_form(d, &basis)?);
        }
        pairing_rows.push(row);
    }
    let dim_ann = total_dim - linalg::rank(&pairing_rows, 1e-10);
    Ok((dim_d, dim_ann, total_dim))
}

fn set_coord(t: &mut FlowEffortTuple, mut j: usize, v: f64) {
    let legs: [&mut Vec<f64>; 2] = [&mut t.f_p.values, &mut t.f_q.values];
    for leg in legs {
        if j < leg.len() {
            leg[j] = v;
            return;
        }
        j -= leg.len();
    }
    for w in &mut t.f_bnd.values {
        if j < w.len() {
            w[j] = v;
            return;
        }
        j -= w.len();
    }
    let legs: [&mut Vec<f64>; 2] = [&mut t.e_p.values, &mut t.e_q.values];
    for leg in legs {
        if j < leg.len() {
            leg[j] = v;
            return;
        }
        j -= leg.len();
    }
    for w in &mut t.e_bnd.values {
        if j < w.len() {
            w[j] = v;
            return;
        }
        j -= w.len();
    }
    panic!("coordinate out of range");
}

/// The four implemented signatures.
pub fn implemented_signatures() -> [Signature; 4] {
    [
        Signature { n: 1, p: 1, q: 1 },
        Signature { n: 2, p: 1, q: 2 },
        Signature { n: 3, p: 2, q: 2 },
        Signature { n: 3, p: 1, q: 3 },
    ]
}
