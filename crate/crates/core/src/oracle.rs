//! Independent check of the extension algorithm: build the level-m graph,
//! impose discrete harmonicity as an exact linear system, and solve it.
//!
//! Vertices carry barycentric coordinates `(a, b)` meaning
//! `(1 - a - b)·p0 + a·p1 + b·p2`, so p0 = (0,0), p1 = (1,0), p2 = (0,1) and
//! the bottom-edge point at position t is `(1 - t, t)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::gasket::{BoundaryValues, CellAddress, Edge, Vertex};

pub const MAX_LEVEL: u32 = 6;

pub type Coord = (Rational, Rational);

/// Values keyed by vertex index of the graph for the same level.
pub type VertexValues = BTreeMap<usize, Rational>;

#[derive(Debug, Clone)]
pub struct GraphVertex {
    pub coord: Coord,
    /// Some cell having this vertex as a corner, for cross-checking against
    /// cell addressing.
    pub cell: CellAddress,
    pub corner: Vertex,
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub address: CellAddress,
    pub corners: [usize; 3],
    /// Midpoint of the side opposite corner i (p12, p02, p01); present for
    /// cells strictly coarser than the graph level.
    pub midpoints: Option<[usize; 3]>,
}

#[derive(Debug, Clone)]
pub struct GasketGraph {
    pub m: u32,
    pub vertices: Vec<GraphVertex>,
    /// Cells of every depth 0..=m, coarse to fine.
    pub cells: Vec<Cell>,
    pub boundary: [usize; 3],
    index: HashMap<Coord, usize>,
}

fn midpoint(a: &Coord, b: &Coord) -> Coord {
    let half = Rational::frac(1, 2);
    ((&a.0 + &b.0) * &half, (&a.1 + &b.1) * &half)
}

impl GasketGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn minimal_triangles(&self) -> impl Iterator<Item = &Cell> {
        let m = self.m as usize;
        self.cells.iter().filter(move |c| c.address.depth() == m)
    }

    pub fn coarse_cells(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| c.midpoints.is_some())
    }

    pub fn vertex_at(&self, coord: &Coord) -> Option<usize> {
        self.index.get(coord).copied()
    }

    /// Index of the vertex at `position` along `edge` (oriented as in
    /// `Edge::endpoints`), if it belongs to the graph.
    pub fn edge_vertex(&self, edge: Edge, position: &Rational) -> Option<usize> {
        let corner = |v: Vertex| -> Coord {
            match v {
                Vertex::P0 => (Rational::zero(), Rational::zero()),
                Vertex::P1 => (Rational::one(), Rational::zero()),
                Vertex::P2 => (Rational::zero(), Rational::one()),
            }
        };
        let (from, to) = edge.endpoints();
        let (a, b) = (corner(from), corner(to));
        let s = Rational::one() - position;
        let coord = (&a.0 * &s + &b.0 * position, &a.1 * &s + &b.1 * position);
        self.vertex_at(&coord)
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary.contains(&v)
    }

    /// Neighbour sets in G_m: two vertices are adjacent iff they are corners
    /// of a common minimal triangle.
    pub fn neighbours(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); self.vertices.len()];
        for cell in self.minimal_triangles() {
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        adj[cell.corners[i]].insert(cell.corners[j]);
                    }
                }
            }
        }
        adj
    }
}

pub fn expected_vertex_count(m: u32) -> usize {
    3 * (3usize.pow(m) + 1) / 2
}

struct Builder {
    vertices: Vec<GraphVertex>,
    index: HashMap<Coord, usize>,
}

impl Builder {
    fn intern(&mut self, coord: Coord, cell: &CellAddress, corner: Vertex) -> usize {
        if let Some(&i) = self.index.get(&coord) {
            return i;
        }
        let i = self.vertices.len();
        self.index.insert(coord.clone(), i);
        self.vertices.push(GraphVertex { coord, cell: cell.clone(), corner });
        i
    }

    fn coord(&self, i: usize) -> &Coord {
        &self.vertices[i].coord
    }
}

pub fn build_graph(m: u32) -> Result<GasketGraph> {
    if m > MAX_LEVEL {
        return Err(Error::LevelTooLarge { max: MAX_LEVEL, got: m });
    }
    let mut b = Builder { vertices: Vec::new(), index: HashMap::new() };
    let root = CellAddress::root();
    let boundary = [
        b.intern((Rational::zero(), Rational::zero()), &root, Vertex::P0),
        b.intern((Rational::one(), Rational::zero()), &root, Vertex::P1),
        b.intern((Rational::zero(), Rational::one()), &root, Vertex::P2),
    ];

    let mut cells = Vec::new();
    let mut level = vec![Cell { address: root, corners: boundary, midpoints: None }];
    for _ in 0..m {
        let mut next = Vec::with_capacity(level.len() * 3);
        for mut cell in level {
            let c = cell.corners;
            let m12 = midpoint(b.coord(c[1]), b.coord(c[2]));
            let m02 = midpoint(b.coord(c[0]), b.coord(c[2]));
            let m01 = midpoint(b.coord(c[0]), b.coord(c[1]));
            let a0 = cell.address.child(Vertex::P0);
            let a1 = cell.address.child(Vertex::P1);
            let a2 = cell.address.child(Vertex::P2);
            let i12 = b.intern(m12, &a1, Vertex::P2);
            let i02 = b.intern(m02, &a0, Vertex::P2);
            let i01 = b.intern(m01, &a0, Vertex::P1);
            next.push(Cell { address: a0, corners: [c[0], i01, i02], midpoints: None });
            next.push(Cell { address: a1, corners: [i01, c[1], i12], midpoints: None });
            next.push(Cell { address: a2, corners: [i02, i12, c[2]], midpoints: None });
            cell.midpoints = Some([i12, i02, i01]);
            cells.push(cell);
        }
        level = next;
    }
    cells.extend(level);

    let graph = GasketGraph { m, vertices: b.vertices, cells, boundary, index: b.index };
    if graph.vertex_count() != expected_vertex_count(m) {
        return Err(Error::Inconsistent(format!(
            "level {m} graph has {} vertices, expected {}",
            graph.vertex_count(),
            expected_vertex_count(m)
        )));
    }
    Ok(graph)
}

type SparseRow = BTreeMap<usize, Rational>;

/// Exact Gaussian elimination on a sparse system `rows · x = rhs`, with
/// `cols` right-hand sides. Pivot: first row with a nonzero entry.
fn eliminate(
    n: usize,
    mut rows: Vec<SparseRow>,
    mut rhs: Vec<Vec<Rational>>,
) -> Result<Vec<Vec<Rational>>> {
    let cols = rhs.first().map_or(0, Vec::len);
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| rows[r].get(&col).is_some_and(|v| !v.is_zero()))
            .ok_or(Error::Singular)?;
        rows.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = rows[col][&col].recip()?;
        let prow: Vec<(usize, Rational)> =
            rows[col].iter().map(|(&j, v)| (j, v * &inv)).collect();
        let prhs: Vec<Rational> = rhs[col].iter().map(|v| v * &inv).collect();
        rows[col] = prow.iter().cloned().collect();
        rhs[col] = prhs.clone();
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = match rows[r].get(&col) {
                Some(f) if !f.is_zero() => f.clone(),
                _ => continue,
            };
            for (j, v) in &prow {
                let entry = rows[r].entry(*j).or_insert_with(Rational::zero);
                *entry -= &factor * v;
                if entry.is_zero() {
                    rows[r].remove(j);
                }
            }
            for k in 0..cols {
                let d = &factor * &prhs[k];
                rhs[r][k] -= d;
            }
        }
    }
    Ok(rhs)
}

/// The mean-value system: every non-boundary vertex equals the average of
/// its four neighbours in G_m. Unknowns are the interior vertices in index
/// order; each boundary vertex contributes one right-hand-side column.
struct MeanValueSystem {
    interior: Vec<usize>,
    rows: Vec<SparseRow>,
    rhs: Vec<Vec<Rational>>,
}

fn mean_value_system(graph: &GasketGraph) -> Result<MeanValueSystem> {
    let adj = graph.neighbours();
    let interior: Vec<usize> = (0..graph.vertex_count()).filter(|&v| !graph.is_boundary(v)).collect();
    let slot: HashMap<usize, usize> = interior.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut rows = Vec::with_capacity(interior.len());
    let mut rhs = Vec::with_capacity(interior.len());
    for &v in &interior {
        if adj[v].len() != 4 {
            return Err(Error::Inconsistent(format!(
                "interior vertex {v} has {} neighbours",
                adj[v].len()
            )));
        }
        let mut row = BTreeMap::new();
        row.insert(slot[&v], Rational::integer(4));
        let mut b = vec![Rational::zero(); 3];
        for &w in &adj[v] {
            match graph.boundary.iter().position(|&p| p == w) {
                Some(k) => b[k] += Rational::one(),
                None => {
                    *row.entry(slot[&w]).or_insert_with(Rational::zero) -= Rational::one();
                }
            }
        }
        rows.push(row);
        rhs.push(b);
    }
    Ok(MeanValueSystem { interior, rows, rhs })
}

fn boundary_values_map(graph: &GasketGraph, bv: &BoundaryValues) -> VertexValues {
    Vertex::ALL
        .iter()
        .map(|&p| (graph.boundary[p.index() as usize], bv.at(p).clone()))
        .collect()
}

/// Solves the level-m system once per boundary vertex, then serves any
/// boundary triple as the corresponding combination of the three basis
/// solutions.
#[derive(Debug, Clone)]
pub struct HarmonicSolver {
    graph: GasketGraph,
    interior: Vec<usize>,
    basis: Vec<[Rational; 3]>,
}

impl HarmonicSolver {
    pub fn new(m: u32) -> Result<Self> {
        if m < 1 {
            return Err(Error::LevelTooSmall { min: 1, got: m });
        }
        let graph = build_graph(m)?;
        let MeanValueSystem { interior, rows, rhs } = mean_value_system(&graph)?;
        let sol = eliminate(interior.len(), rows, rhs)?;
        let basis = sol
            .into_iter()
            .map(|r| {
                let mut it = r.into_iter();
                [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]
            })
            .collect();
        Ok(HarmonicSolver { graph, interior, basis })
    }

    pub fn graph(&self) -> &GasketGraph {
        &self.graph
    }

    pub fn solve(&self, bv: &BoundaryValues) -> VertexValues {
        let mut out = boundary_values_map(&self.graph, bv);
        for (&v, w) in self.interior.iter().zip(&self.basis) {
            let value = &w[0] * &bv.alpha + &w[1] * &bv.beta + &w[2] * &bv.gamma;
            out.insert(v, value);
        }
        out
    }
}

/// Exact harmonic values on G_m by a fresh elimination for this triple.
/// Keys are vertex indices of `build_graph(m)`.
pub fn solve_harmonic(m: u32, bv: &BoundaryValues) -> Result<VertexValues> {
    if m < 1 {
        return Err(Error::LevelTooSmall { min: 1, got: m });
    }
    let graph = build_graph(m)?;
    let MeanValueSystem { interior, rows, rhs } = mean_value_system(&graph)?;
    let vals = [&bv.alpha, &bv.beta, &bv.gamma];
    let rhs = rhs
        .into_iter()
        .map(|b| vec![b.iter().zip(vals).map(|(c, v)| c * v).sum()])
        .collect();
    let sol = eliminate(interior.len(), rows, rhs)?;
    let mut out = boundary_values_map(&graph, bv);
    for (v, mut r) in interior.into_iter().zip(sol) {
        out.insert(v, r.pop().unwrap());
    }
    Ok(out)
}

/// Whether `f(v_i)+f(v_j)+f(v_ik)+f(v_jk) = 4 f(v_ij)` holds for every pair of
/// corners of every cell refined in G_m.
pub fn check_five_point(values: &VertexValues, m: u32) -> Result<bool> {
    let graph = build_graph(m)?;
    check_five_point_on(&graph, values)
}

pub fn check_five_point_on(graph: &GasketGraph, values: &VertexValues) -> Result<bool> {
    let get = |v: usize| values.get(&v).ok_or(Error::MissingVertex(v));
    for v in 0..graph.vertex_count() {
        get(v)?;
    }
    for cell in graph.coarse_cells() {
        let mid = cell.midpoints.expect("coarse cell has midpoints");
        for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
            // The midpoint of side (a, b) is opposite the remaining corner.
            let lhs = get(cell.corners[i])? + get(cell.corners[j])? + get(mid[j])? + get(mid[i])?;
            if lhs != get(mid[k])? * 4 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Harmonic values on G_m computed by the extension algorithm via each
/// vertex's witness cell.
pub fn extension_values(graph: &GasketGraph, bv: &BoundaryValues) -> VertexValues {
    graph
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (i, crate::gasket::cell_values(bv, &v.cell).at(v.corner).clone()))
        .collect()
}
