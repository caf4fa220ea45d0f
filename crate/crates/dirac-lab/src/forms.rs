//! Discrete differential forms on staggered cubical grids.
//!
//! Cochains store cell integrals, never point samples: the exterior
//! derivative is then an exact integer-weighted coboundary and the discrete
//! Stokes theorem holds to the last bit. A cochain is either primal (values
//! on the cells of the grid itself) or dual (values on the staggered dual
//! cells; a dual `k`-cochain is stored slot-for-slot with the primal
//! `(n-k)`-cells it is dual to). Dual cells are oriented so that
//! primal x dual matches the ambient orientation, which makes the diagonal
//! Hodge map a plain positive measure ratio and the primal-dual pairing a
//! collocated dot product.
//!
//! The derivative of a dual cochain is the signed transpose of the primal
//! incidence plus a boundary closure built from supplied trace values. That
//! construction makes the discrete integration-by-parts identity
//! `<da, b> + (-1)^deg(a) <a, d_closed b> = boundary pairing` exact for any
//! closure values, which is what the power-balance and isotropy checks
//! downstream lean on.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exterior;
use crate::mesh::{complement, perm_sign, BoundaryMesh, CellId, Mesh, Wall};

/// Which grid a cochain's values live on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Staggering {
    Primal,
    Dual,
}

impl Staggering {
    pub fn toggled(self) -> Staggering {
        match self {
            Staggering::Primal => Staggering::Dual,
            Staggering::Dual => Staggering::Primal,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Staggering::Primal => "p",
            Staggering::Dual => "d",
        }
    }
}

/// A degree-`k` discrete differential form: one real per oriented `k`-cell.
#[derive(Debug, Clone)]
pub struct Cochain {
    pub mesh: Arc<Mesh>,
    pub degree: usize,
    pub grid: Staggering,
    pub values: Vec<f64>,
}

impl Cochain {
    pub fn zeros(mesh: &Arc<Mesh>, degree: usize, grid: Staggering) -> Result<Cochain> {
        let n = mesh.dim();
        if degree > n {
            return Err(Error::InvalidDegree { degree, max: n });
        }
        let len = mesh.cell_count(storage_degree(n, degree, grid));
        Ok(Cochain {
            mesh: mesh.clone(),
            degree,
            grid,
            values: vec![0.0; len],
        })
    }

    pub fn from_values(
        mesh: &Arc<Mesh>,
        degree: usize,
        grid: Staggering,
        values: Vec<f64>,
    ) -> Result<Cochain> {
        let mut c = Cochain::zeros(mesh, degree, grid)?;
        if values.len() != c.values.len() {
            return Err(Error::ValueCountMismatch {
                expected: c.values.len(),
                got: values.len(),
            });
        }
        c.values = values;
        Ok(c)
    }

    /// Degree of the primal cells the values are stored on.
    pub fn storage_degree(&self) -> usize {
        storage_degree(self.mesh.dim(), self.degree, self.grid)
    }

    pub fn scaled(&self, s: f64) -> Cochain {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= s;
        }
        out
    }

    pub fn add_scaled(&mut self, other: &Cochain, s: f64) {
        debug_assert_eq!(self.values.len(), other.values.len());
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += s * b;
        }
    }

    /// Mass-weighted squared norm, the discrete `integral of b wedge star b`.
    pub fn norm_sq(&self) -> f64 {
        let k = self.storage_degree();
        let mut acc = 0.0;
        for (i, id) in self.mesh.cells(k) {
            let w = match self.grid {
                Staggering::Primal => self.mesh.dual_measure(&id) / self.mesh.primal_measure(&id),
                Staggering::Dual => self.mesh.primal_measure(&id) / self.mesh.dual_measure(&id),
            };
            acc += self.values[i] * self.values[i] * w;
        }
        acc
    }
}

fn storage_degree(n: usize, degree: usize, grid: Staggering) -> usize {
    match grid {
        Staggering::Primal => degree,
        Staggering::Dual => n - degree,
    }
}

/// Boundary trace values, one block of values per wall.
///
/// Primal traces carry the wall's induced-orientation sign folded into the
/// values; dual (interpolated) traces store plain dual-cell integrals on the
/// wall's own staggered grid.
#[derive(Debug, Clone)]
pub struct BoundaryCochain {
    pub boundary: BoundaryMesh,
    pub degree: usize,
    pub grid: Staggering,
    pub values: Vec<Vec<f64>>,
}

impl BoundaryCochain {
    pub fn zeros(mesh: &Arc<Mesh>, degree: usize, grid: Staggering) -> BoundaryCochain {
        let boundary = BoundaryMesh::new(mesh.clone());
        let wall_dim = mesh.dim() - 1;
        let k = storage_degree(wall_dim, degree, grid);
        let values = boundary
            .walls
            .iter()
            .map(|w| vec![0.0; boundary.wall_cell_count(w, k)])
            .collect();
        BoundaryCochain {
            boundary,
            degree,
            grid,
            values,
        }
    }

    pub fn wall_storage_degree(&self) -> usize {
        storage_degree(self.boundary.dim(), self.degree, self.grid)
    }

    /// Sum of all values; for a top-degree primal trace this is the oriented
    /// boundary integral.
    pub fn total(&self) -> f64 {
        self.values.iter().map(|v| v.iter().sum::<f64>()).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        // Mass weights on each wall's own grid.
        let k = self.wall_storage_degree();
        let mut acc = 0.0;
        for (wi, wall) in self.boundary.walls.iter().enumerate() {
            for (ci, id) in self.boundary.wall_cells(wall, k).iter().enumerate() {
                let pm: f64 = id
                    .axes
                    .iter()
                    .map(|&a| self.boundary.parent.spacings()[a])
                    .product();
                let dm = self.boundary.wall_dual_measure(wall, id);
                let w = match self.grid {
                    Staggering::Primal => dm / pm,
                    Staggering::Dual => pm / dm,
                };
                acc += self.values[wi][ci] * self.values[wi][ci] * w;
            }
        }
        acc
    }
}

/// Boundary handling for the derivative of a dual cochain.
#[derive(Debug, Clone, Copy)]
pub enum DualClosure<'a> {
    /// Treat the trace of the cochain as zero on the boundary.
    Zero,
    /// Close the truncated dual cells with these trace values.
    Trace(&'a BoundaryCochain),
}

/// Exterior derivative (signed coboundary). Dual cochains use the zero
/// closure; see [`exterior_derivative_closed`] for explicit trace values.
pub fn exterior_derivative(c: &Cochain) -> Result<Cochain> {
    exterior_derivative_closed(c, DualClosure::Zero)
}

/// Exterior derivative with an explicit boundary closure for dual cochains.
pub fn exterior_derivative_closed(c: &Cochain, closure: DualClosure) -> Result<Cochain> {
    let n = c.mesh.dim();
    if c.degree >= n {
        return Err(Error::DerivativeAtTopDegree(n));
    }
    let mut out = Cochain::zeros(&c.mesh, c.degree + 1, c.grid)?;
    match c.grid {
        Staggering::Primal => {
            let k1 = c.degree + 1;
            for (i, id) in c.mesh.cells(k1) {
                let mut acc = 0.0;
                for (face, sign) in c.mesh.boundary_of(k1, &id) {
                    acc += sign as f64 * c.values[c.mesh.cell_index(c.degree, &face)];
                }
                out.values[i] = acc;
            }
        }
        Staggering::Dual => {
            let j = c.storage_degree();
            let t_sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let c_sign = -t_sign;
            for (i, id) in c.mesh.cells(j - 1) {
                let mut acc = 0.0;
                for (coface, sign) in c.mesh.cofaces_of(j - 1, &id) {
                    acc += sign as f64 * c.values[c.mesh.cell_index(j, &coface)];
                }
                acc *= t_sign;
                if let DualClosure::Trace(tr) = closure {
                    for (wi, wall) in tr.boundary.walls.iter().enumerate() {
                        if !c.mesh.cell_on_wall(&id, wall) {
                            continue;
                        }
                        let slot = wall_slot_index(&tr.boundary, wall, &id);
                        acc += c_sign * wall.sign as f64 * tr.values[wi][slot];
                    }
                }
                out.values[i] = acc;
            }
        }
    }
    Ok(out)
}

fn wall_slot_index(boundary: &BoundaryMesh, wall: &Wall, id: &CellId) -> usize {
    // Deterministic position of a parent cell within the wall enumeration.
    let cells = boundary.wall_cells(wall, id.axes.len());
    cells
        .iter()
        .position(|c| c == id)
        .expect("cell not on wall")
}

/// Diagonal Hodge map; toggles the staggering and complements the degree.
pub fn hodge(c: &Cochain) -> Cochain {
    let n = c.mesh.dim();
    let k = c.degree;
    let mut out = Cochain::zeros(&c.mesh, n - k, c.grid.toggled()).expect("degree in range");
    let sd = c.storage_degree();
    let flip = if (k * (n - k)) % 2 == 1 { -1.0 } else { 1.0 };
    for (i, id) in c.mesh.cells(sd) {
        let pm = c.mesh.primal_measure(&id);
        let dm = c.mesh.dual_measure(&id);
        out.values[i] = match c.grid {
            Staggering::Primal => c.values[i] * dm / pm,
            Staggering::Dual => flip * c.values[i] * pm / dm,
        };
    }
    out
}

/// The complementary-degree pairing. With the staggered storage the integral
/// of the wedge collapses to a collocated dot product; the sign convention is
/// pinned so that `pair_complementary(&hodge(b), b)` is the nonnegative mass
/// norm of `b`, which makes the function evaluate `integral of b wedge a`.
pub fn pair_complementary(a: &Cochain, b: &Cochain) -> Result<f64> {
    let n = a.mesh.dim();
    if !Arc::ptr_eq(&a.mesh, &b.mesh) {
        return Err(Error::MeshMismatch);
    }
    if a.degree + b.degree != n {
        return Err(Error::DegreeMismatch {
            expected: n - b.degree.min(n),
            got: a.degree,
        });
    }
    if a.grid == b.grid {
        return Err(Error::StaggeringMismatch);
    }
    let (primal, dual) = match a.grid {
        Staggering::Primal => (a, b),
        Staggering::Dual => (b, a),
    };
    let mut acc = 0.0;
    for (pv, dv) in primal.values.iter().zip(&dual.values) {
        acc += pv * dv;
    }
    // The collocated sum is the integral of primal wedge dual. The pinned
    // convention evaluates the wedge with the first argument on the right,
    // so flip by the anticommutation parity when the first argument is the
    // primal one.
    let sign = if a.grid == Staggering::Primal && (a.degree * b.degree) % 2 == 1 {
        -1.0
    } else {
        1.0
    };
    Ok(sign * acc)
}

/// Integral of a top-degree cochain over the whole domain.
pub fn integrate_top(c: &Cochain) -> Result<f64> {
    let n = c.mesh.dim();
    if c.degree != n {
        return Err(Error::DegreeMismatch {
            expected: n,
            got: c.degree,
        });
    }
    Ok(c.values.iter().sum())
}

/// Boundary restriction. Primal cochains restrict exactly, with the induced
/// orientation sign folded into the values; dual cochains are interpolated
/// one-sidedly onto each wall's own staggered grid and stored plain.
pub fn trace_boundary(c: &Cochain) -> Result<BoundaryCochain> {
    let n = c.mesh.dim();
    if c.degree > n - 1 {
        return Err(Error::DerivativeAtTopDegree(n));
    }
    match c.grid {
        Staggering::Primal => {
            let mut out = BoundaryCochain::zeros(&c.mesh, c.degree, Staggering::Primal);
            for (wi, wall) in out.boundary.walls.clone().iter().enumerate() {
                for (ci, id) in out.boundary.wall_cells(wall, c.degree).iter().enumerate() {
                    out.values[wi][ci] =
                        wall.sign as f64 * c.values[c.mesh.cell_index(c.degree, id)];
                }
            }
            Ok(out)
        }
        Staggering::Dual => Ok(dual_trace(c)),
    }
}

/// One-sided trace of a dual cochain: for each wall slot, take the nearest
/// interior collocated component and integrate it over the wall's dual cell.
fn dual_trace(c: &Cochain) -> BoundaryCochain {
    let mesh = &c.mesh;
    let n = mesh.dim();
    let k = c.degree; // form degree; stored on primal (n-k)-cells
    let mut out = BoundaryCochain::zeros(mesh, k, Staggering::Dual);
    let wall_k = out.wall_storage_degree(); // n-1-k
    for (wi, wall) in out.boundary.walls.clone().iter().enumerate() {
        for (ci, beta) in out.boundary.wall_cells(wall, wall_k).iter().enumerate() {
            // Parent storage cell: the wall cell's axes plus the wall axis,
            // one layer inside.
            let mut axes = beta.axes.clone();
            axes.push(wall.axis);
            axes.sort_unstable();
            let mut pos = beta.pos.clone();
            pos[wall.axis] = match wall.side {
                crate::mesh::Side::Lower => 0,
                crate::mesh::Side::Upper => mesh.cells_per_axis()[wall.axis] - 1,
            };
            let parent = CellId { axes: axes.clone(), pos };
            let comp_axes = complement(n, &axes);
            let idx = mesh.cell_index(axes.len(), &parent);
            let comp = c.values[idx] * perm_sign(&axes, &comp_axes) as f64
                / mesh.dual_measure(&parent);
            let wall_sgn = perm_sign(&beta.axes, &comp_axes) as f64;
            out.values[wi][ci] =
                comp * wall_sgn * out.boundary.wall_dual_measure(wall, beta);
        }
    }
    out
}

/// Collocated pairing of a signed primal trace with a plain dual trace:
/// the integral of `primal wedge dual` over the boundary.
pub fn boundary_pair(primal: &BoundaryCochain, dual: &BoundaryCochain) -> Result<f64> {
    if primal.grid != Staggering::Primal || dual.grid != Staggering::Dual {
        return Err(Error::StaggeringMismatch);
    }
    if primal.wall_storage_degree() != dual.wall_storage_degree() {
        return Err(Error::DegreeMismatch {
            expected: primal.wall_storage_degree(),
            got: dual.wall_storage_degree(),
        });
    }
    let mut acc = 0.0;
    for (pw, dw) in primal.values.iter().zip(&dual.values) {
        for (pv, dv) in pw.iter().zip(dw) {
            acc += pv * dv;
        }
    }
    Ok(acc)
}

/// Orthonormal-coframe components of a form at the n-cell centers.
#[derive(Debug, Clone)]
pub struct PointField {
    pub mesh: Arc<Mesh>,
    pub degree: usize,
    /// `comps[cell][subset]`, subsets in lexicographic order.
    pub comps: Vec<Vec<f64>>,
}

impl PointField {
    pub fn comp_count(&self) -> usize {
        exterior::comp_count(self.mesh.dim(), self.degree)
    }
}

/// Average incident cell integrals into coframe components at cell centers.
pub fn to_point_field(c: &Cochain) -> PointField {
    let mesh = &c.mesh;
    let n = mesh.dim();
    let ncells = mesh.cell_count(n);
    let subsets = mesh.subsets(c.degree).to_vec();
    let mut comps = vec![vec![0.0; subsets.len()]; ncells];
    for (ci, cell) in mesh.cells(n) {
        for (si, sub) in subsets.iter().enumerate() {
            let (store_axes, sgn) = match c.grid {
                Staggering::Primal => (sub.clone(), 1.0),
                Staggering::Dual => {
                    let st = complement(n, sub);
                    let sgn = perm_sign(&st, sub) as f64;
                    (st, sgn)
                }
            };
            let free: Vec<usize> = (0..n).filter(|a| !store_axes.contains(a)).collect();
            let mut acc = 0.0;
            let combos = 1usize << free.len();
            for bits in 0..combos {
                let mut pos = cell.pos.clone();
                for (bi, &a) in free.iter().enumerate() {
                    pos[a] = cell.pos[a] + ((bits >> bi) & 1);
                }
                let id = CellId {
                    axes: store_axes.clone(),
                    pos,
                };
                let idx = mesh.cell_index(store_axes.len(), &id);
                let measure = match c.grid {
                    Staggering::Primal => mesh.primal_measure(&id),
                    Staggering::Dual => mesh.dual_measure(&id),
                };
                acc += c.values[idx] * sgn / measure;
            }
            comps[ci][si] = acc / combos as f64;
        }
    }
    PointField {
        mesh: mesh.clone(),
        degree: c.degree,
        comps,
    }
}

/// Assemble a cochain from cell-center components; the right inverse of
/// [`to_point_field`] on constant fields, and for the 1-d dual staggering the
/// exact adjoint used by the pointwise-density effort.
pub fn from_point_field(f: &PointField, degree: usize, grid: Staggering) -> Result<Cochain> {
    let mesh = &f.mesh;
    let n = mesh.dim();
    if degree != f.degree {
        return Err(Error::DegreeMismatch {
            expected: f.degree,
            got: degree,
        });
    }
    let subsets = mesh.subsets(degree).to_vec();
    let mut out = Cochain::zeros(mesh, degree, grid)?;
    let sd = out.storage_degree();
    for (i, id) in mesh.cells(sd) {
        let (comp_axes, sgn) = match grid {
            Staggering::Primal => (id.axes.clone(), 1.0),
            Staggering::Dual => {
                let ca = complement(n, &id.axes);
                let sgn = perm_sign(&id.axes, &ca) as f64;
                (ca, sgn)
            }
        };
        let si = subsets.iter().position(|s| s == &comp_axes).unwrap();
        // incident n-cells: range over the vertex-indexed axes of the slot
        let free: Vec<usize> = (0..n).filter(|a| !id.axes.contains(a)).collect();
        let mut acc = 0.0;
        let mut count = 0usize;
        let combos = 1usize << free.len();
        for bits in 0..combos {
            let mut pos = id.pos.clone();
            let mut ok = true;
            for (bi, &a) in free.iter().enumerate() {
                if (bits >> bi) & 1 == 1 {
                    pos[a] = id.pos[a];
                } else {
                    if id.pos[a] == 0 {
                        ok = false;
                        break;
                    }
                    pos[a] = id.pos[a] - 1;
                }
                if pos[a] >= mesh.cells_per_axis()[a] {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            let ncell = CellId {
                axes: (0..n).collect(),
                pos,
            };
            acc += f.comps[mesh.cell_index(n, &ncell)][si];
            count += 1;
        }
        let mean = acc / count as f64;
        let measure = match grid {
            Staggering::Primal => mesh.primal_measure(&id),
            Staggering::Dual => mesh.dual_measure(&id),
        };
        out.values[i] = mean * measure * sgn;
    }
    Ok(out)
}

/// Sample a cochain from closed-form coframe components evaluated at the
/// slot collocation points (midpoint rule).
pub fn sample_cochain<F>(
    mesh: &Arc<Mesh>,
    degree: usize,
    grid: Staggering,
    f: F,
) -> Result<Cochain>
where
    F: Fn(&[f64], &[usize]) -> f64,
{
    let n = mesh.dim();
    let mut out = Cochain::zeros(mesh, degree, grid)?;
    let sd = out.storage_degree();
    for (i, id) in mesh.cells(sd) {
        let x = mesh.collocation_point(&id);
        out.values[i] = match grid {
            Staggering::Primal => f(&x, &id.axes) * mesh.primal_measure(&id),
            Staggering::Dual => {
                let comp_axes = complement(n, &id.axes);
                f(&x, &comp_axes)
                    * perm_sign(&id.axes, &comp_axes) as f64
                    * mesh.dual_measure(&id)
            }
        };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh;

    fn splitmix(state: &mut u64) -> f64 {
        *state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = *state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    }

    fn random_cochain(mesh: &Arc<Mesh>, degree: usize, grid: Staggering, seed: u64) -> Cochain {
        let mut c = Cochain::zeros(mesh, degree, grid).unwrap();
        let mut s = seed;
        for v in &mut c.values {
            *v = splitmix(&mut s);
        }
        c
    }

    #[test]
    fn one_d_derivative_is_differences() {
        let mesh = Mesh::new(1, &[4], &[1.0]).unwrap();
        let c = Cochain::from_values(
            &mesh,
            0,
            Staggering::Primal,
            vec![0.0, 1.0, 2.0, 3.0, 4.0],
        )
        .unwrap();
        let d = exterior_derivative(&c).unwrap();
        assert_eq!(d.values, vec![1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn dd_is_zero_everywhere() {
        // the incidence-squared relation is an exact integer identity (see
        // the mesh tests); applied to f64 values the inner sums round first,
        // so the float residual sits at machine level
        for (dim, cells) in [(2usize, vec![2, 2]), (3, vec![2, 3, 2])] {
            let lens = vec![1.0; dim];
            let mesh = Mesh::new(dim, &cells, &lens).unwrap();
            for k in 0..dim - 1 {
                for (grid, seed) in [(Staggering::Primal, 7u64), (Staggering::Dual, 17)] {
                    let c = random_cochain(&mesh, k, grid, seed + k as u64);
                    let scale = c.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                    let dd = exterior_derivative(&exterior_derivative(&c).unwrap()).unwrap();
                    for v in dd.values {
                        assert!(v.abs() <= 16.0 * f64::EPSILON * scale, "dd = {v:e}");
                    }
                }
            }
        }
    }

    #[test]
    fn three_d_face_cochain_coboundary_matches_hand_enumeration() {
        // +1 on the six outward-oriented faces of the unit cube. With the
        // Leibniz incidence the x- and z-aligned upper faces enter with +1,
        // lower with -1, and the y pair flips, so summing the *outward*
        // orientation values means summing incidence signs of each face.
        let mesh = Mesh::new(3, &[1, 1, 1], &[1.0, 1.0, 1.0]).unwrap();
        let top = mesh.cell_id(3, 0);
        let faces = mesh.boundary_of(3, &top);
        let mut c = Cochain::zeros(&mesh, 2, Staggering::Primal).unwrap();
        // outward-oriented unit flux: value = incidence sign
        for (face, sign) in &faces {
            c.values[mesh.cell_index(2, face)] = *sign as f64;
        }
        let d = exterior_derivative(&c).unwrap();
        let expected: f64 = faces.iter().map(|(_, s)| (*s * *s) as f64).sum();
        assert_eq!(d.values, vec![expected]); // 6 = number of faces
    }

    #[test]
    fn hodge_involution_signs_per_dimension() {
        for (dim, cells, lens) in [
            (1usize, vec![5], vec![1.3]),
            (2, vec![3, 4], vec![1.0, 0.7]),
            (3, vec![2, 3, 2], vec![1.0, 1.1, 0.9]),
        ] {
            let mesh = Mesh::new(dim, &cells, &lens).unwrap();
            for k in 0..=dim {
                for grid in [Staggering::Primal, Staggering::Dual] {
                    let c = random_cochain(&mesh, k, grid, 3 * k as u64 + dim as u64);
                    let cc = hodge(&hodge(&c));
                    let sign = if (k * (dim - k)) % 2 == 0 { 1.0 } else { -1.0 };
                    for (a, b) in cc.values.iter().zip(&c.values) {
                        assert!((a - sign * b).abs() <= 1e-14 * b.abs().max(1.0));
                    }
                }
            }
        }
    }

    #[test]
    fn one_d_hodge_of_constant_zero_form() {
        let mesh = Mesh::new(1, &[4], &[1.0]).unwrap();
        let h = mesh.spacings()[0];
        let v = 2.5;
        let c = Cochain::from_values(&mesh, 0, Staggering::Primal, vec![v; 5]).unwrap();
        let s = hodge(&c);
        assert_eq!(s.degree, 1);
        assert_eq!(s.grid, Staggering::Dual);
        // interior dual cells have length h, the two end cells h/2
        assert_eq!(s.values[0], v * h / 2.0);
        for i in 1..4 {
            assert!((s.values[i] - v * h).abs() < 1e-15);
        }
        assert_eq!(s.values[4], v * h / 2.0);
        let back = hodge(&s);
        for (a, b) in back.values.iter().zip(&c.values) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn three_d_unit_edge_hodge() {
        let mesh = Mesh::new(3, &[2, 2, 2], &[2.0, 2.0, 2.0]).unwrap();
        // spacing 1: an interior x-edge maps to a unit-valued y-z dual face
        let mut c = Cochain::zeros(&mesh, 1, Staggering::Primal).unwrap();
        let id = CellId {
            axes: vec![0],
            pos: vec![0, 1, 1],
        };
        c.values[mesh.cell_index(1, &id)] = 1.0;
        let s = hodge(&c);
        assert_eq!(s.degree, 2);
        assert!((s.values[mesh.cell_index(1, &id)] - 1.0).abs() < 1e-15);
        let ss = hodge(&s);
        for (a, b) in ss.values.iter().zip(&c.values) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn pairing_is_positive_on_hodge_pairs() {
        let mesh = Mesh::new(2, &[3, 3], &[1.0, 1.0]).unwrap();
        for k in 0..=2 {
            for grid in [Staggering::Primal, Staggering::Dual] {
                let b = random_cochain(&mesh, k, grid, 11 + k as u64);
                let p = pair_complementary(&hodge(&b), &b).unwrap();
                assert!(p >= 0.0);
                assert!((p - b.norm_sq()).abs() <= 1e-12 * p.abs().max(1.0));
            }
        }
    }

    #[test]
    fn pairing_quadrature_oracle() {
        // 1-cochain storing integrals of f(z) = z over edges against the
        // constant-1 dual zero-form: the total integral 0.5.
        let mesh = Mesh::new(1, &[64], &[1.0]).unwrap();
        let f = sample_cochain(&mesh, 1, Staggering::Primal, |x, _| x[0]).unwrap();
        let one = Cochain::from_values(&mesh, 0, Staggering::Dual, vec![1.0; 64]).unwrap();
        let integral = pair_complementary(&one, &f).unwrap();
        assert!((integral - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pairing_antisymmetry_matches_pointwise_wedge() {
        // pair(a,b) = (-1)^{k(n-k)} pair(b,a), exactly on random values, and
        // quantitatively against the pointwise exterior-algebra oracle on
        // smooth fields (midpoint-quadrature agreement).
        for (dim, cells) in [(2usize, vec![24, 24]), (3, vec![8, 8, 8])] {
            let lens = vec![1.0; dim];
            let mesh = Mesh::new(dim, &cells, &lens).unwrap();
            for k in 0..=dim {
                let a = sample_cochain(&mesh, dim - k, Staggering::Dual, |x, s| {
                    (3.0 * x[0] + s.len() as f64).sin() + 0.3
                })
                .unwrap();
                let b = sample_cochain(&mesh, k, Staggering::Primal, |x, s| {
                    (2.0 * x[dim - 1] - s.iter().sum::<usize>() as f64).cos() + 0.2
                })
                .unwrap();
                let ab = pair_complementary(&a, &b).unwrap();
                let ba = pair_complementary(&b, &a).unwrap();
                let sign = if (k * (dim - k)) % 2 == 0 { 1.0 } else { -1.0 };
                assert!((ab - sign * ba).abs() <= 1e-12 * ab.abs().max(1.0));

                // oracle: integrate b ^ a from cell-center components
                let fa = to_point_field(&a);
                let fb = to_point_field(&b);
                let mut acc = 0.0;
                for (ci, cell) in mesh.cells(dim) {
                    let w = crate::exterior::wedge(
                        dim,
                        k,
                        &fb.comps[ci],
                        dim - k,
                        &fa.comps[ci],
                    );
                    acc += w[0] * mesh.primal_measure(&cell);
                }
                assert!(
                    (ab - acc).abs() <= 0.05 * ab.abs().max(0.05),
                    "dim {dim} k {k}: pair {ab} vs oracle {acc}"
                );
            }
        }
    }

    #[test]
    fn integrate_top_basics() {
        let mesh = Mesh::new(1, &[8], &[1.0]).unwrap();
        let c = sample_cochain(&mesh, 1, Staggering::Primal, |_, _| 1.0).unwrap();
        assert!((integrate_top(&c).unwrap() - 1.0).abs() < 1e-15);
        let z = Cochain::zeros(&mesh, 1, Staggering::Primal).unwrap();
        assert_eq!(integrate_top(&z).unwrap(), 0.0);
        let low = Cochain::zeros(&mesh, 0, Staggering::Primal).unwrap();
        assert!(integrate_top(&low).is_err());
    }

    #[test]
    fn stokes_exact_all_dims() {
        for (dim, cells) in [(1usize, vec![6]), (2, vec![3, 4]), (3, vec![2, 3, 2])] {
            let lens: Vec<f64> = (0..dim).map(|a| 1.0 + 0.25 * a as f64).collect();
            let mesh = Mesh::new(dim, &cells, &lens).unwrap();
            let c = random_cochain(&mesh, dim - 1, Staggering::Primal, 23);
            let lhs = integrate_top(&exterior_derivative(&c).unwrap()).unwrap();
            let rhs = trace_boundary(&c).unwrap().total();
            assert!(
                (lhs - rhs).abs() <= 1e-13 * lhs.abs().max(1.0),
                "dim {dim}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn one_d_trace_signs() {
        let mesh = Mesh::new(1, &[4], &[1.0]).unwrap();
        let c = Cochain::from_values(
            &mesh,
            0,
            Staggering::Primal,
            vec![3.0, 0.0, 0.0, 0.0, 7.0],
        )
        .unwrap();
        let tr = trace_boundary(&c).unwrap();
        assert_eq!(tr.values[0], vec![-3.0]);
        assert_eq!(tr.values[1], vec![7.0]);
    }

    #[test]
    fn two_d_perimeter_circulation() {
        // trace of a 1-cochain onto the perimeter against a hand-enumerated
        // counterclockwise walk on the 2x2 grid.
        let mesh = Mesh::new(2, &[2, 2], &[1.0, 1.0]).unwrap();
        let c = random_cochain(&mesh, 1, Staggering::Primal, 91);
        let tr = trace_boundary(&c).unwrap();
        let total = tr.total();

        // counterclockwise: bottom edges (+x), right edges (+y),
        // top edges (-x), left edges (-y)
        let e = |axes: Vec<usize>, pos: Vec<usize>| {
            c.values[mesh.cell_index(1, &CellId { axes, pos })]
        };
        let mut walk = 0.0;
        walk += e(vec![0], vec![0, 0]) + e(vec![0], vec![1, 0]); // bottom
        walk += e(vec![1], vec![2, 0]) + e(vec![1], vec![2, 1]); // right
        walk -= e(vec![0], vec![1, 2]) + e(vec![0], vec![0, 2]); // top
        walk -= e(vec![1], vec![0, 1]) + e(vec![1], vec![0, 0]); // left
        assert!((total - walk).abs() < 1e-14);
    }

    #[test]
    fn green_identity_exact_with_arbitrary_closures() {
        // <da,b> + (-1)^deg(a) <a, d_closed b> equals the boundary pairing,
        // bit-exactly up to rounding, for every degree and dimension.
        for (dim, cells) in [(1usize, vec![5]), (2, vec![3, 2]), (3, vec![2, 2, 2])] {
            let lens: Vec<f64> = (0..dim).map(|a| 1.0 + 0.5 * a as f64).collect();
            let mesh = Mesh::new(dim, &cells, &lens).unwrap();
            for ka in 0..dim {
                let kb = dim - ka - 1;
                let a = random_cochain(&mesh, ka, Staggering::Primal, 100 + ka as u64);
                let b = random_cochain(&mesh, kb, Staggering::Dual, 200 + kb as u64);
                let tr_b = trace_boundary(&b).unwrap();
                let da = exterior_derivative(&a).unwrap();
                let db = exterior_derivative_closed(&b, DualClosure::Trace(&tr_b)).unwrap();
                let lhs = pair_complementary(&b, &da).unwrap()
                    + if ka % 2 == 0 { 1.0 } else { -1.0 }
                        * pair_complementary(&db, &a).unwrap();
                let tr_a = trace_boundary(&a).unwrap();
                let rhs = boundary_pair(&tr_a, &tr_b).unwrap();
                assert!(
                    (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0),
                    "dim {dim} ka {ka}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn point_field_roundtrips() {
        let mesh = Mesh::new(2, &[3, 2], &[1.0, 1.0]).unwrap();
        for k in 0..=2 {
            for grid in [Staggering::Primal, Staggering::Dual] {
                let f0 = sample_cochain(&mesh, k, grid, |_, _| 2.0).unwrap();
                let pf = to_point_field(&f0);
                for cell in &pf.comps {
                    for v in cell {
                        assert!((v - 2.0).abs() < 1e-13);
                    }
                }
                let back = from_point_field(&pf, k, grid).unwrap();
                for (a, b) in back.values.iter().zip(&f0.values) {
                    assert!((a - b).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn linear_field_midpoint_components() {
        let mesh = Mesh::new(1, &[8], &[1.0]).unwrap();
        let c = sample_cochain(&mesh, 1, Staggering::Primal, |x, _| x[0]).unwrap();
        let pf = to_point_field(&c);
        for (ci, cell) in mesh.cells(1) {
            let mid = mesh.collocation_point(&cell)[0];
            assert!((pf.comps[ci][0] - mid).abs() < 1e-14);
        }
    }

    #[test]
    fn operations_are_linear() {
        let mesh = Mesh::new(2, &[3, 3], &[1.0, 1.3]).unwrap();
        let a = random_cochain(&mesh, 1, Staggering::Primal, 31);
        let b = random_cochain(&mesh, 1, Staggering::Primal, 32);
        let mut combo = a.scaled(2.5);
        combo.add_scaled(&b, -1.25);
        let d_combo = exterior_derivative(&combo).unwrap();
        let mut d_sep = exterior_derivative(&a).unwrap().scaled(2.5);
        d_sep.add_scaled(&exterior_derivative(&b).unwrap(), -1.25);
        for (x, y) in d_combo.values.iter().zip(&d_sep.values) {
            assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
        }
        let h_combo = hodge(&combo);
        let mut h_sep = hodge(&a).scaled(2.5);
        h_sep.add_scaled(&hodge(&b), -1.25);
        for (x, y) in h_combo.values.iter().zip(&h_sep.values) {
            assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
        }
    }
}
