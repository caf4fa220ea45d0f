//! Structured cubical complexes on intervals, rectangles and boxes.
//!
//! A `Mesh` is a tensor-product grid with uniform spacing per axis. Cells of
//! degree `k` are indexed by an axis subset of size `k` (the axes along which
//! the cell extends) and a position multi-index: cell indices along chosen
//! axes, vertex indices along the others. Enumeration is lexicographic, first
//! by axis subset, then by position with the last axis fastest; this ordering
//! is part of the external contract (snapshots reproduce byte-for-byte).

use std::sync::Arc;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

/// All sorted axis subsets of `{0..n}` with `k` elements, in lexicographic order.
pub fn axis_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for a in start..n {
            cur.push(a);
            rec(n, k, a + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 0, &mut cur, &mut out);
    out
}

/// Complement of a sorted axis subset within `{0..n}`.
pub fn complement(n: usize, subset: &[usize]) -> Vec<usize> {
    (0..n).filter(|a| !subset.contains(a)).collect()
}

/// Sign of the permutation sorting the concatenation of two disjoint sorted
/// subsets into ascending order. This is the coefficient in
/// `sigma^S wedge sigma^T = perm_sign(S,T) sigma^{sorted(S u T)}`.
pub fn perm_sign(left: &[usize], right: &[usize]) -> i32 {
    let mut inversions = 0usize;
    for &l in left {
        inversions += right.iter().filter(|&&r| r < l).count();
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Identity of one cell: which axes it extends along and where it sits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellId {
    /// Sorted axes the cell extends along (`len() == degree`).
    pub axes: Vec<usize>,
    /// Cell index along axes in `axes`, vertex index along the rest.
    pub pos: Vec<usize>,
}

/// A structured cubical complex of dimension 1, 2 or 3.
#[derive(Debug, Clone)]
pub struct Mesh {
    dim: usize,
    cells_per_axis: Vec<usize>,
    spacings: Vec<f64>,
    /// Per degree: the axis subsets, block offsets and block extents.
    layout: Vec<DegreeLayout>,
}

#[derive(Debug, Clone)]
struct DegreeLayout {
    subsets: Vec<Vec<usize>>,
    /// Start of each subset block within the degree's global index range.
    offsets: Vec<usize>,
    /// Extents per axis of each subset block.
    extents: Vec<Vec<usize>>,
    total: usize,
}

impl Mesh {
    /// Build a mesh with `cells_per_axis[a]` cells and total length `lengths[a]`
    /// along each axis.
    pub fn new(dim: usize, cells_per_axis: &[usize], lengths: &[f64]) -> Result<Arc<Mesh>> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidDimension(dim));
        }
        if cells_per_axis.len() != dim || lengths.len() != dim {
            return Err(Error::InvalidDimension(dim));
        }
        for (axis, &count) in cells_per_axis.iter().enumerate() {
            if count == 0 {
                return Err(Error::InvalidCellCount { axis, count });
            }
        }
        for (axis, &length) in lengths.iter().enumerate() {
            if !(length > 0.0) {
                return Err(Error::InvalidLength { axis, length });
            }
        }
        let spacings: Vec<f64> = lengths
            .iter()
            .zip(cells_per_axis)
            .map(|(&l, &m)| l / m as f64)
            .collect();
        let mut layout = Vec::with_capacity(dim + 1);
        for k in 0..=dim {
            let subsets = axis_subsets(dim, k);
            let mut offsets = Vec::with_capacity(subsets.len());
            let mut extents = Vec::with_capacity(subsets.len());
            let mut total = 0usize;
            for s in &subsets {
                let ext: Vec<usize> = (0..dim)
                    .map(|a| {
                        if s.contains(&a) {
                            cells_per_axis[a]
                        } else {
                            cells_per_axis[a] + 1
                        }
                    })
                    .collect();
                offsets.push(total);
                total += ext.iter().product::<usize>();
                extents.push(ext);
            }
            layout.push(DegreeLayout {
                subsets,
                offsets,
                extents,
                total,
            });
        }
        Ok(Arc::new(Mesh {
            dim,
            cells_per_axis: cells_per_axis.to_vec(),
            spacings,
            layout,
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells_per_axis(&self) -> &[usize] {
        &self.cells_per_axis
    }

    pub fn spacings(&self) -> &[f64] {
        &self.spacings
    }

    /// Number of `k`-cells.
    pub fn cell_count(&self, k: usize) -> usize {
        self.layout[k].total
    }

    pub fn subsets(&self, k: usize) -> &[Vec<usize>] {
        &self.layout[k].subsets
    }

    /// Global index of a `k`-cell from its identity.
    pub fn cell_index(&self, k: usize, id: &CellId) -> usize {
        let lay = &self.layout[k];
        let si = lay
            .subsets
            .iter()
            .position(|s| s == &id.axes)
            .expect("axis subset not of this degree");
        let ext = &lay.extents[si];
        let mut lin = 0usize;
        for a in 0..self.dim {
            lin = lin * ext[a] + id.pos[a];
        }
        lay.offsets[si] + lin
    }

    /// Identity of the `k`-cell with the given global index.
    pub fn cell_id(&self, k: usize, index: usize) -> CellId {
        let lay = &self.layout[k];
        let si = match lay.offsets.binary_search(&index) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let mut lin = index - lay.offsets[si];
        let ext = &lay.extents[si];
        let mut pos = vec![0usize; self.dim];
        for a in (0..self.dim).rev() {
            pos[a] = lin % ext[a];
            lin /= ext[a];
        }
        CellId {
            axes: lay.subsets[si].clone(),
            pos,
        }
    }

    /// Iterate over all `k`-cells in index order.
    pub fn cells(&self, k: usize) -> impl Iterator<Item = (usize, CellId)> + '_ {
        (0..self.cell_count(k)).map(move |i| (i, self.cell_id(k, i)))
    }

    /// Primal measure of a cell: product of spacings along its axes.
    pub fn primal_measure(&self, id: &CellId) -> f64 {
        id.axes.iter().map(|&a| self.spacings[a]).product()
    }

    /// Length of the dual segment along `axis` around vertex index `i`
    /// (halved at the two ends of the axis).
    pub fn dual_len(&self, axis: usize, i: usize) -> f64 {
        let h = self.spacings[axis];
        if i == 0 || i == self.cells_per_axis[axis] {
            0.5 * h
        } else {
            h
        }
    }

    /// Measure of the dual cell: product of dual lengths along the axes the
    /// cell does not extend along.
    pub fn dual_measure(&self, id: &CellId) -> f64 {
        (0..self.dim)
            .filter(|a| !id.axes.contains(a))
            .map(|a| self.dual_len(a, id.pos[a]))
            .product()
    }

    /// Shared collocation point of a cell and its dual: midpoints along the
    /// cell's own axes, vertex coordinates along the rest.
    pub fn collocation_point(&self, id: &CellId) -> Vec<f64> {
        (0..self.dim)
            .map(|a| {
                let h = self.spacings[a];
                if id.axes.contains(&a) {
                    (id.pos[a] as f64 + 0.5) * h
                } else {
                    id.pos[a] as f64 * h
                }
            })
            .collect()
    }

    /// Coboundary faces of a `(k+1)`-cell: `(face k-cell, incidence sign)`.
    ///
    /// Signs follow the Leibniz rule for products of intervals, so applying
    /// the relation twice cancels exactly.
    pub fn boundary_of(&self, k1: usize, id: &CellId) -> Vec<(CellId, i32)> {
        debug_assert_eq!(id.axes.len(), k1);
        let mut out = Vec::with_capacity(2 * k1);
        for (m, &t) in id.axes.iter().enumerate() {
            let axes: Vec<usize> = id.axes.iter().copied().filter(|&a| a != t).collect();
            let m_sign = if m % 2 == 0 { 1 } else { -1 };
            let mut lower = id.pos.clone();
            let mut upper = id.pos.clone();
            // positions along t become vertex indices
            lower[t] = id.pos[t];
            upper[t] = id.pos[t] + 1;
            out.push((
                CellId {
                    axes: axes.clone(),
                    pos: upper,
                },
                m_sign,
            ));
            out.push((
                CellId {
                    axes,
                    pos: lower,
                },
                -m_sign,
            ));
        }
        out
    }

    /// Cells of degree `k+1` incident to a given `k`-cell, with the incidence
    /// sign of the `k`-cell in their boundary.
    pub fn cofaces_of(&self, k: usize, id: &CellId) -> Vec<(CellId, i32)> {
        debug_assert_eq!(id.axes.len(), k);
        let mut out = Vec::new();
        for t in 0..self.dim {
            if id.axes.contains(&t) {
                continue;
            }
            let mut axes = id.axes.clone();
            axes.push(t);
            axes.sort_unstable();
            let m = axes.iter().position(|&a| a == t).unwrap();
            let m_sign = if m % 2 == 0 { 1 } else { -1 };
            let vi = id.pos[t];
            // coface with the k-cell as its upper face along t
            if vi >= 1 {
                let mut pos = id.pos.clone();
                pos[t] = vi - 1;
                out.push((
                    CellId {
                        axes: axes.clone(),
                        pos,
                    },
                    m_sign,
                ));
            }
            // coface with the k-cell as its lower face along t
            if vi < self.cells_per_axis[t] {
                let pos = id.pos.clone();
                out.push((CellId { axes, pos }, -m_sign));
            }
        }
        out
    }

    /// Euler characteristic of the complex.
    pub fn euler_characteristic(&self) -> i64 {
        (0..=self.dim)
            .map(|k| {
                let c = self.cell_count(k) as i64;
                if k % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .sum()
    }

    /// The walls making up the boundary complex.
    pub fn walls(&self) -> Vec<Wall> {
        let mut out = Vec::with_capacity(2 * self.dim);
        for axis in 0..self.dim {
            for side in [Side::Lower, Side::Upper] {
                out.push(Wall {
                    axis,
                    side,
                    sign: wall_sign(axis, side),
                });
            }
        }
        out
    }

    /// Is this cell contained in the given wall?
    pub fn cell_on_wall(&self, id: &CellId, wall: &Wall) -> bool {
        if id.axes.contains(&wall.axis) {
            return false;
        }
        let edge = match wall.side {
            Side::Lower => 0,
            Side::Upper => self.cells_per_axis[wall.axis],
        };
        id.pos[wall.axis] == edge
    }

    /// Number of distinct boundary `k`-cells (cells lying in at least one wall).
    pub fn boundary_cell_count(&self, k: usize) -> usize {
        if self.dim == 0 {
            return 0;
        }
        let mut count = 0usize;
        for (_, id) in self.cells(k) {
            let interior = (0..self.dim).all(|a| {
                id.axes.contains(&a) || (id.pos[a] > 0 && id.pos[a] < self.cells_per_axis[a])
            });
            if !interior && id.axes.len() < self.dim {
                count += 1;
            }
        }
        count
    }

    /// Euler characteristic of the boundary complex (deduplicated cells).
    pub fn boundary_euler_characteristic(&self) -> i64 {
        (0..self.dim)
            .map(|k| {
                let c = self.boundary_cell_count(k) as i64;
                if k % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .sum()
    }
}

/// Which face of the box a wall is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

/// One of the `2n` flat faces of the box, an `(n-1)`-dimensional grid over the
/// axes other than `axis`, carrying the induced orientation sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Wall {
    pub axis: usize,
    pub side: Side,
    /// Induced-orientation sign of this wall relative to its own
    /// ascending-axes chart.
    pub sign: i32,
}

fn wall_sign(axis: usize, side: Side) -> i32 {
    let axis_sign = if axis % 2 == 0 { 1 } else { -1 };
    match side {
        Side::Upper => axis_sign,
        Side::Lower => -axis_sign,
    }
}

impl Wall {
    /// Vertex index pinned along the wall's axis.
    pub fn pinned_pos(&self, mesh: &Mesh) -> usize {
        match self.side {
            Side::Lower => 0,
            Side::Upper => mesh.cells_per_axis()[self.axis],
        }
    }

    /// The axes of the wall's own grid, ascending.
    pub fn axes(&self, mesh: &Mesh) -> Vec<usize> {
        (0..mesh.dim()).filter(|&a| a != self.axis).collect()
    }
}

/// The boundary complex of a mesh, organized wall by wall.
///
/// Walls overlap along box edges and corners; per-wall storage keeps each
/// wall's cells separate, which is what the boundary pairing integrates over.
/// `boundary_cell_count` on the parent mesh gives deduplicated counts.
#[derive(Debug, Clone)]
pub struct BoundaryMesh {
    pub parent: Arc<Mesh>,
    pub walls: Vec<Wall>,
}

impl BoundaryMesh {
    pub fn new(parent: Arc<Mesh>) -> BoundaryMesh {
        let walls = parent.walls();
        BoundaryMesh { parent, walls }
    }

    pub fn dim(&self) -> usize {
        self.parent.dim() - 1
    }

    /// Number of `k`-cells of one wall's grid.
    pub fn wall_cell_count(&self, wall: &Wall, k: usize) -> usize {
        let mesh = &self.parent;
        let axes = wall.axes(mesh);
        axis_subsets(axes.len(), k)
            .iter()
            .map(|s| {
                axes.iter()
                    .enumerate()
                    .map(|(i, &a)| {
                        if s.contains(&i) {
                            mesh.cells_per_axis()[a]
                        } else {
                            mesh.cells_per_axis()[a] + 1
                        }
                    })
                    .product::<usize>()
            })
            .sum()
    }

    /// Enumerate one wall's `k`-cells in deterministic order as parent cells.
    ///
    /// The returned `CellId`s are parent-mesh identities (the wall's pinned
    /// vertex index filled in); their axis subsets never contain the wall axis.
    pub fn wall_cells(&self, wall: &Wall, k: usize) -> Vec<CellId> {
        let mesh = &self.parent;
        let n = mesh.dim();
        let axes = wall.axes(mesh);
        let pinned = wall.pinned_pos(mesh);
        let mut out = Vec::new();
        for s in axis_subsets(axes.len(), k) {
            let cell_axes: Vec<usize> = s.iter().map(|&i| axes[i]).collect();
            let ext: Vec<usize> = axes
                .iter()
                .map(|&a| {
                    if cell_axes.contains(&a) {
                        mesh.cells_per_axis()[a]
                    } else {
                        mesh.cells_per_axis()[a] + 1
                    }
                })
                .collect();
            let total: usize = ext.iter().product();
            for lin0 in 0..total {
                let mut lin = lin0;
                let mut pos = vec![0usize; n];
                pos[wall.axis] = pinned;
                for i in (0..axes.len()).rev() {
                    pos[axes[i]] = lin % ext[i];
                    lin /= ext[i];
                }
                out.push(CellId {
                    axes: cell_axes.clone(),
                    pos,
                });
            }
        }
        out
    }

    /// Dual measure of a wall cell within the wall's own grid.
    pub fn wall_dual_measure(&self, wall: &Wall, id: &CellId) -> f64 {
        let mesh = &self.parent;
        wall.axes(mesh)
            .iter()
            .filter(|a| !id.axes.contains(a))
            .map(|&a| mesh.dual_len(a, id.pos[a]))
            .product()
    }
}
