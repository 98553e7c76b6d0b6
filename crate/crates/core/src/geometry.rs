//! Unit-square geometry, uniform placement and radius-`r` neighbor structure.
//!
//! The square is hard-walled: distances are plain Euclidean, no wrap-around.
//! Two nodes are neighbors when their distance is at most `r` (closed ball).

use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Position {
    x: f64,
    y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(invalid(format!("position ({x}, {y}) outside the unit square")));
        }
        Ok(Position { x, y })
    }

    /// Caller guarantees both coordinates are in `[0, 1]`.
    pub(crate) fn new_unchecked(x: f64, y: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y));
        Position { x, y }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn distance_sq(&self, other: &Position) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn distance(&self, other: &Position) -> f64 {
        self.distance_sq(other).sqrt()
    }

    /// Distance to the nearest wall of the square.
    pub fn wall_distance(&self) -> f64 {
        self.x.min(1.0 - self.x).min(self.y).min(1.0 - self.y)
    }
}

pub fn uniform_position<R: Rng + ?Sized>(rng: &mut R) -> Position {
    Position::new_unchecked(rng.gen::<f64>(), rng.gen::<f64>())
}

pub fn sample_uniform_positions<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<Position>> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    Ok((0..n).map(|_| uniform_position(rng)).collect())
}

/// Anything the gossip engine can run on: a fixed node set with per-node
/// neighbor lists.
pub trait Topology {
    fn node_count(&self) -> usize;

    /// Neighbors of `i`, sorted by id. `i` must be in range.
    fn adjacent(&self, i: usize) -> &[usize];

    /// Number of undirected edges.
    fn edge_count(&self) -> usize {
        (0..self.node_count()).map(|i| self.adjacent(i).len()).sum::<usize>() / 2
    }
}

/// Node positions at one instant plus their radius-`r` neighbor lists.
///
/// Neighbors are found through a uniform grid whose cell side is at least
/// `r`, so every query touches at most nine cells. Immutable once built.
#[derive(Debug, Clone)]
pub struct Snapshot {
    positions: Vec<Position>,
    radius: f64,
    cells_per_side: usize,
    // counting-sort layout: nodes of cell c are cell_nodes[cell_start[c]..cell_start[c + 1]]
    cell_start: Vec<usize>,
    cell_nodes: Vec<usize>,
    adj_start: Vec<usize>,
    adj: Vec<usize>,
}

pub fn build_snapshot(positions: Vec<Position>, r: f64) -> Result<Snapshot> {
    let mut snap = Snapshot::empty(r)?;
    snap.rebuild(positions);
    Ok(snap)
}

impl Snapshot {
    pub(crate) fn empty(r: f64) -> Result<Self> {
        if !r.is_finite() || r <= 0.0 {
            return Err(invalid(format!("radius must be positive, got {r}")));
        }
        Ok(Snapshot {
            positions: Vec::new(),
            radius: r,
            cells_per_side: 1,
            cell_start: Vec::new(),
            cell_nodes: Vec::new(),
            adj_start: vec![0],
            adj: Vec::new(),
        })
    }

    /// Re-index for a new set of positions, reusing buffers.
    pub(crate) fn rebuild(&mut self, positions: Vec<Position>) {
        let n = positions.len();
        let r = self.radius;
        // m <= 1/r keeps the cell side >= r; the sqrt(n) cap bounds memory for tiny r
        let by_radius = if r >= 1.0 { 1 } else { (1.0 / r).floor() as usize };
        let by_count = ((2.0 * (n as f64).sqrt()).ceil() as usize).max(1);
        let m = by_radius.min(by_count).max(1);
        self.cells_per_side = m;
        self.positions = positions;

        let cell_of = |p: &Position| -> usize {
            let cx = ((p.x * m as f64) as usize).min(m - 1);
            let cy = ((p.y * m as f64) as usize).min(m - 1);
            cy * m + cx
        };

        self.cell_start.clear();
        self.cell_start.resize(m * m + 1, 0);
        for p in &self.positions {
            self.cell_start[cell_of(p) + 1] += 1;
        }
        for c in 0..m * m {
            self.cell_start[c + 1] += self.cell_start[c];
        }
        self.cell_nodes.clear();
        self.cell_nodes.resize(n, 0);
        let mut fill = self.cell_start.clone();
        for (i, p) in self.positions.iter().enumerate() {
            let c = cell_of(p);
            self.cell_nodes[fill[c]] = i;
            fill[c] += 1;
        }

        let r2 = r * r;
        self.adj.clear();
        self.adj_start.clear();
        self.adj_start.push(0);
        for i in 0..n {
            let p = self.positions[i];
            let c = cell_of(&p);
            let (cx, cy) = (c % m, c / m);
            let begin = self.adj.len();
            for ny in cy.saturating_sub(1)..=(cy + 1).min(m - 1) {
                for nx in cx.saturating_sub(1)..=(cx + 1).min(m - 1) {
                    let cell = ny * m + nx;
                    for &j in &self.cell_nodes[self.cell_start[cell]..self.cell_start[cell + 1]] {
                        if j != i && p.distance_sq(&self.positions[j]) <= r2 {
                            self.adj.push(j);
                        }
                    }
                }
            }
            self.adj[begin..].sort_unstable();
            self.adj_start.push(self.adj.len());
        }
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn cells_per_side(&self) -> usize {
        self.cells_per_side
    }

    /// Ids stored in grid cell `(cx, cy)`.
    pub fn cell_members(&self, cx: usize, cy: usize) -> &[usize] {
        let c = cy * self.cells_per_side + cx;
        &self.cell_nodes[self.cell_start[c]..self.cell_start[c + 1]]
    }

    pub fn neighbors(&self, i: usize) -> Result<&[usize]> {
        if i >= self.len() {
            return Err(Error::NodeOutOfRange { id: i, n: self.len() });
        }
        Ok(self.adjacent(i))
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj_start[i + 1] - self.adj_start[i]
    }
}

impl Topology for Snapshot {
    fn node_count(&self) -> usize {
        self.positions.len()
    }

    fn adjacent(&self, i: usize) -> &[usize] {
        &self.adj[self.adj_start[i]..self.adj_start[i + 1]]
    }

    fn edge_count(&self) -> usize {
        self.adj.len() / 2
    }
}

/// Neighbor lists by all-pairs scan. Quadratic; used as a reference.
pub fn brute_force_neighbors(positions: &[Position], r: f64) -> Vec<Vec<usize>> {
    let r2 = r * r;
    (0..positions.len())
        .map(|i| {
            (0..positions.len())
                .filter(|&j| j != i && positions[i].distance_sq(&positions[j]) <= r2)
                .collect()
        })
        .collect()
}
