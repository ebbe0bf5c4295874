//! Random network geometry: node placement, source-destination pairing,
//! cluster partitioning with 9-color TDMA, and the occupancy statistics the
//! clustered schemes depend on.
//!
//! Positions are stored in unit-square coordinates with `side` as the scale
//! factor, so dense (`side = 1`) and extended (`side = sqrt(n)`) networks
//! share all geometry code. Public accessors return physical coordinates.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// Unit area, node density grows with n.
    Dense,
    /// Fixed density, area sqrt(n) x sqrt(n).
    Extended,
}

impl Regime {
    pub fn side(self, n: usize) -> f64 {
        match self {
            Regime::Dense => 1.0,
            Regime::Extended => (n as f64).sqrt(),
        }
    }
}

/// A sampled network: node locations plus the source -> destination
/// permutation. Immutable after construction; operations that "modify" it
/// return a new value.
#[derive(Debug, Clone)]
pub struct NetworkInstance {
    n: usize,
    regime: Regime,
    side: f64,
    /// Unit-square coordinates, scaled by `side` on access.
    unit_positions: Vec<[f64; 2]>,
    /// pairing[s] = destination of source s; identity until paired.
    pairing: Vec<usize>,
    seed: u64,
}

impl NetworkInstance {
    /// n i.i.d. uniform positions on [0, side]^2; pairing left as identity.
    pub fn sample(n: usize, regime: Regime, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("need at least 2 nodes, got {n}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let unit_positions = (0..n).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        Ok(NetworkInstance {
            n,
            regime,
            side: regime.side(n),
            unit_positions,
            pairing: (0..n).collect(),
            seed,
        })
    }

    /// Build an instance from explicit physical positions (used by tests and
    /// for replaying serialized geometries).
    pub fn from_positions(
        regime: Regime,
        positions: Vec<[f64; 2]>,
        pairing: Option<Vec<usize>>,
        seed: u64,
    ) -> Result<Self> {
        let n = positions.len();
        if n < 2 {
            return Err(Error::invalid(format!("need at least 2 nodes, got {n}")));
        }
        let side = regime.side(n);
        for p in &positions {
            if !(0.0..=side).contains(&p[0]) || !(0.0..=side).contains(&p[1]) {
                return Err(Error::invalid(format!(
                    "position ({}, {}) outside [0, {side}]^2",
                    p[0], p[1]
                )));
            }
        }
        let pairing = match pairing {
            Some(p) => {
                validate_permutation(&p, n)?;
                p
            }
            None => (0..n).collect(),
        };
        Ok(NetworkInstance {
            n,
            regime,
            side,
            unit_positions: positions.iter().map(|p| [p[0] / side, p[1] / side]).collect(),
            pairing,
            seed,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn regime(&self) -> Regime {
        self.regime
    }

    #[inline]
    pub fn side(&self) -> f64 {
        self.side
    }

    #[inline]
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Physical coordinates of node i.
    #[inline]
    pub fn position(&self, i: usize) -> [f64; 2] {
        let p = self.unit_positions[i];
        [p[0] * self.side, p[1] * self.side]
    }

    #[inline]
    pub fn unit_position(&self, i: usize) -> [f64; 2] {
        self.unit_positions[i]
    }

    pub fn positions(&self) -> Vec<[f64; 2]> {
        (0..self.n).map(|i| self.position(i)).collect()
    }

    #[inline]
    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    #[inline]
    pub fn destination(&self, s: usize) -> usize {
        self.pairing[s]
    }

    pub fn pairing_is_derangement(&self) -> bool {
        self.pairing.iter().enumerate().all(|(i, &d)| i != d)
    }

    #[inline]
    pub fn distance(&self, i: usize, k: usize) -> f64 {
        let a = self.unit_positions[i];
        let b = self.unit_positions[k];
        let dx = a[0] - b[0];
        let dy = a[1] - b[1];
        (dx * dx + dy * dy).sqrt() * self.side
    }

    /// Uniformly random pairing with fixed points swapped away, so every
    /// node generates traffic toward a distinct destination.
    pub fn with_random_pairing(&self, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let mut pairing: Vec<usize> = (0..self.n).collect();
        pairing.shuffle(&mut rng);
        // Swapping the value at a fixed point i with the value at any other
        // index j removes the fixed point at i and cannot create one at j.
        for i in 0..self.n {
            if pairing[i] == i {
                let mut j = rng.gen_range(0..self.n - 1);
                if j >= i {
                    j += 1;
                }
                pairing.swap(i, j);
            }
        }
        debug_assert!(pairing.iter().enumerate().all(|(i, &d)| i != d));
        let mut out = self.clone();
        out.pairing = pairing;
        out
    }

    /// Reinterpret an extended instance as the dense instance obtained by
    /// dividing all coordinates by sqrt(n). Cell memberships are preserved
    /// for any matching cluster size.
    pub fn rescaled_dense(&self) -> Self {
        let mut out = self.clone();
        out.regime = Regime::Dense;
        out.side = 1.0;
        out
    }

    /// Exact minimum distance over all node pairs.
    pub fn min_pairwise_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.n {
            for k in (i + 1)..self.n {
                let d = self.distance(i, k);
                if d < best {
                    best = d;
                }
            }
        }
        best
    }

    /// Squarelet statistics for extended networks: unit-area max occupancy,
    /// whether all squarelets of area 2 ln n are occupied, and the number of
    /// source-destination pairs crossing the vertical median left to right.
    pub fn squarelet_checks(&self) -> Result<SquareletStats> {
        if self.regime != Regime::Extended {
            return Err(Error::InvalidRegime("extended"));
        }
        let n = self.n;
        // Unit-area squarelets; for non-square n the grid rounds down and the
        // squarelets are slightly larger than unit area.
        let g1 = (self.side.floor() as usize).max(1);
        let mut counts = vec![0usize; g1 * g1];
        for p in &self.unit_positions {
            let cx = ((p[0] * g1 as f64) as usize).min(g1 - 1);
            let cy = ((p[1] * g1 as f64) as usize).min(g1 - 1);
            counts[cy * g1 + cx] += 1;
        }
        let max_unit_occupancy = counts.iter().copied().max().unwrap_or(0);

        let target = (2.0 * (n as f64).ln()).sqrt();
        let g2 = ((self.side / target).floor() as usize).max(1);
        let mut occupied = vec![false; g2 * g2];
        for p in &self.unit_positions {
            let cx = ((p[0] * g2 as f64) as usize).min(g2 - 1);
            let cy = ((p[1] * g2 as f64) as usize).min(g2 - 1);
            occupied[cy * g2 + cx] = true;
        }
        let all_2logn_occupied = occupied.iter().all(|&o| o);

        let cut = 0.5;
        let crossing_count = (0..n)
            .filter(|&s| {
                let d = self.pairing[s];
                self.unit_positions[s][0] < cut && self.unit_positions[d][0] >= cut
            })
            .count();

        Ok(SquareletStats {
            max_unit_occupancy,
            all_2logn_occupied,
            crossing_count,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let record = InstanceRecord {
            n: self.n,
            regime: self.regime,
            side: self.side,
            positions: self.positions(),
            pairing: self.pairing.clone(),
            seed: self.seed,
        };
        Ok(serde_json::to_string_pretty(&record)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let record: InstanceRecord = serde_json::from_str(text)?;
        let inst = NetworkInstance::from_positions(
            record.regime,
            record.positions,
            Some(record.pairing),
            record.seed,
        )?;
        if inst.n != record.n {
            return Err(Error::invalid("node count does not match positions"));
        }
        Ok(inst)
    }
}

fn validate_permutation(p: &[usize], n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::invalid("pairing length does not match node count"));
    }
    let mut seen = vec![false; n];
    for &d in p {
        if d >= n || seen[d] {
            return Err(Error::invalid("pairing is not a permutation"));
        }
        seen[d] = true;
    }
    Ok(())
}

/// Flat serialized form of an instance (physical coordinates).
#[derive(Serialize, Deserialize)]
struct InstanceRecord {
    n: usize,
    regime: Regime,
    side: f64,
    positions: Vec<[f64; 2]>,
    pairing: Vec<usize>,
    seed: u64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SquareletStats {
    pub max_unit_occupancy: usize,
    pub all_2logn_occupied: bool,
    pub crossing_count: usize,
}

/// Partition of the square into g x g cells with per-cell membership, the
/// four half-cell splits, and the 3x3 periodic coloring used for TDMA.
#[derive(Debug, Clone)]
pub struct ClusterGrid {
    /// Cells per axis.
    dim: usize,
    /// Cluster-size target the grid was built for.
    target_m: usize,
    /// Mean nodes per cell, n / dim^2.
    mean_occupancy: f64,
    /// Physical cell area (side / dim)^2.
    cell_area: f64,
    cell_width: f64,
    cells: Vec<Vec<usize>>,
    /// Per cell: [x-split, y-split], each split = [lower half, upper half].
    halves: Vec<[[Vec<usize>; 2]; 2]>,
    coloring: Vec<u8>,
}

/// Cardinal direction used to pick the half of a cell nearer to / farther
/// from a neighboring cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    XNeg,
    XPos,
    YNeg,
    YPos,
}

impl ClusterGrid {
    /// Partition with cells of area ~ M * side^2 / n. A non-integer
    /// sqrt(n/M) rounds the per-axis cell count down, enlarging cells; the
    /// effective area is recorded in `cell_area`.
    pub fn build(instance: &NetworkInstance, m: usize) -> Result<Self> {
        if m < 1 || m > instance.n() {
            return Err(Error::invalid(format!(
                "cluster size {m} outside 1..={}",
                instance.n()
            )));
        }
        let dim = ((instance.n() as f64 / m as f64).sqrt().floor() as usize).max(1);
        Self::build_with_dim(instance, dim, m)
    }

    /// Partition with an explicit per-axis cell count.
    pub fn build_with_dim(instance: &NetworkInstance, dim: usize, target_m: usize) -> Result<Self> {
        if dim < 1 {
            return Err(Error::invalid("grid dimension must be at least 1"));
        }
        let n = instance.n();
        let g = dim;
        let mut cells = vec![Vec::new(); g * g];
        for i in 0..n {
            let p = instance.unit_position(i);
            let cx = ((p[0] * g as f64) as usize).min(g - 1);
            let cy = ((p[1] * g as f64) as usize).min(g - 1);
            cells[cy * g + cx].push(i);
        }
        let mut halves = Vec::with_capacity(g * g);
        for (idx, members) in cells.iter().enumerate() {
            let cx = idx % g;
            let cy = idx / g;
            let center_x = (cx as f64 + 0.5) / g as f64;
            let center_y = (cy as f64 + 0.5) / g as f64;
            let mut split = [[Vec::new(), Vec::new()], [Vec::new(), Vec::new()]];
            for &i in members {
                let p = instance.unit_position(i);
                split[0][usize::from(p[0] >= center_x)].push(i);
                split[1][usize::from(p[1] >= center_y)].push(i);
            }
            halves.push(split);
        }
        let coloring = (0..g * g).map(|idx| ((idx % g) % 3 + 3 * ((idx / g) % 3)) as u8).collect();
        let side = instance.side();
        Ok(ClusterGrid {
            dim: g,
            target_m,
            mean_occupancy: n as f64 / (g * g) as f64,
            cell_area: (side / g as f64) * (side / g as f64),
            cell_width: side / g as f64,
            cells,
            halves,
            coloring,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn num_cells(&self) -> usize {
        self.dim * self.dim
    }

    #[inline]
    pub fn target_m(&self) -> usize {
        self.target_m
    }

    #[inline]
    pub fn mean_occupancy(&self) -> f64 {
        self.mean_occupancy
    }

    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.cell_area
    }

    #[inline]
    pub fn cell_width(&self) -> f64 {
        self.cell_width
    }

    #[inline]
    pub fn members(&self, cell: usize) -> &[usize] {
        &self.cells[cell]
    }

    #[inline]
    pub fn color(&self, cell: usize) -> u8 {
        self.coloring[cell]
    }

    pub fn colors(&self) -> &[u8] {
        &self.coloring
    }

    #[inline]
    pub fn cell_xy(&self, cell: usize) -> (usize, usize) {
        (cell % self.dim, cell / self.dim)
    }

    #[inline]
    pub fn cell_index(&self, cx: usize, cy: usize) -> usize {
        cy * self.dim + cx
    }

    /// Cell containing node i.
    pub fn cell_of(&self, instance: &NetworkInstance, i: usize) -> usize {
        let p = instance.unit_position(i);
        let g = self.dim;
        let cx = ((p[0] * g as f64) as usize).min(g - 1);
        let cy = ((p[1] * g as f64) as usize).min(g - 1);
        self.cell_index(cx, cy)
    }

    /// Physical center of a cell.
    pub fn cell_center(&self, cell: usize, side: f64) -> [f64; 2] {
        let (cx, cy) = self.cell_xy(cell);
        [
            (cx as f64 + 0.5) / self.dim as f64 * side,
            (cy as f64 + 0.5) / self.dim as f64 * side,
        ]
    }

    /// The two halves of `cell` along the axis pointing at `dir`:
    /// (near half, far half) relative to that direction.
    pub fn halves(&self, cell: usize, dir: Direction) -> (&[usize], &[usize]) {
        let split = &self.halves[cell];
        match dir {
            Direction::XPos => (&split[0][1], &split[0][0]),
            Direction::XNeg => (&split[0][0], &split[0][1]),
            Direction::YPos => (&split[1][1], &split[1][0]),
            Direction::YNeg => (&split[1][0], &split[1][1]),
        }
    }

    /// Chebyshev distance in cell indices.
    pub fn cell_chebyshev(&self, a: usize, b: usize) -> usize {
        let (ax, ay) = self.cell_xy(a);
        let (bx, by) = self.cell_xy(b);
        ax.abs_diff(bx).max(ay.abs_diff(by))
    }

    /// Exact occupancy extremes over cells and over the four distinct
    /// half-cell sets of every cell.
    pub fn occupancy_stats(&self) -> OccupancyStats {
        let mut min_count = usize::MAX;
        let mut max_count = 0;
        let mut half_min_count = usize::MAX;
        for (idx, members) in self.cells.iter().enumerate() {
            min_count = min_count.min(members.len());
            max_count = max_count.max(members.len());
            for axis in 0..2 {
                for half in 0..2 {
                    half_min_count = half_min_count.min(self.halves[idx][axis][half].len());
                }
            }
        }
        OccupancyStats {
            min_count,
            max_count,
            half_min_count,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct OccupancyStats {
    pub min_count: usize,
    pub max_count: usize,
    pub half_min_count: usize,
}

/// Large-deviation exponent for cell occupancy: (1+d) ln(1+d) - d. The
/// probability that a cell of expected occupancy M leaves the (1 +- d) band
/// is bounded by (cells) * exp(-M * lambda(d)) per tail.
pub fn occupancy_exponent(delta: f64) -> f64 {
    (1.0 + delta) * (1.0 + delta).ln() - delta
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_rejects_tiny_networks() {
        assert!(NetworkInstance::sample(1, Regime::Dense, 0).is_err());
        assert!(NetworkInstance::sample(2, Regime::Dense, 0).is_ok());
    }

    #[test]
    fn sample_is_reproducible_and_in_bounds() {
        let a = NetworkInstance::sample(100, Regime::Extended, 7).unwrap();
        let b = NetworkInstance::sample(100, Regime::Extended, 7).unwrap();
        assert_eq!(a.positions(), b.positions());
        assert!((a.side() - 10.0).abs() < 1e-12);
        for i in 0..100 {
            let p = a.position(i);
            assert!(p[0] >= 0.0 && p[0] <= 10.0 && p[1] >= 0.0 && p[1] <= 10.0);
        }
        // identity pairing until explicitly paired
        assert_eq!(a.pairing()[3], 3);
    }

    #[test]
    fn pairing_of_two_nodes_is_the_swap() {
        for seed in 0..32 {
            let inst = NetworkInstance::sample(2, Regime::Dense, seed).unwrap().with_random_pairing(seed);
            assert_eq!(inst.pairing(), &[1, 0]);
        }
    }

    #[test]
    fn pairing_is_always_a_derangement() {
        for seed in 0..50 {
            let inst = NetworkInstance::sample(100, Regime::Dense, 1).unwrap().with_random_pairing(seed);
            assert!(inst.pairing_is_derangement());
            let mut sorted = inst.pairing().to_vec();
            sorted.sort_unstable();
            assert_eq!(sorted, (0..100).collect::<Vec<_>>());
        }
    }

    #[test]
    fn pairing_is_deterministic_and_does_not_mutate() {
        let base = NetworkInstance::sample(60, Regime::Dense, 3).unwrap();
        let a = base.with_random_pairing(11);
        let b = base.with_random_pairing(11);
        assert_eq!(a.pairing(), b.pairing());
        assert_eq!(base.pairing(), (0..60).collect::<Vec<_>>());
    }

    #[test]
    fn grid_arithmetic_16_nodes() {
        let inst = NetworkInstance::sample(16, Regime::Dense, 5).unwrap();
        let grid = ClusterGrid::build(&inst, 4).unwrap();
        assert_eq!(grid.num_cells(), 4);
        assert!((grid.cell_area() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn grid_coloring_uses_nine_colors_and_separates() {
        let inst = NetworkInstance::sample(81, Regime::Dense, 5).unwrap();
        let grid = ClusterGrid::build(&inst, 9).unwrap();
        assert_eq!(grid.num_cells(), 9);
        let mut seen = [false; 9];
        for c in grid.colors() {
            seen[*c as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));

        // On larger grids, same-colored cells are >= 3 apart in Chebyshev
        // cell distance.
        let inst = NetworkInstance::sample(1024, Regime::Dense, 5).unwrap();
        let grid = ClusterGrid::build(&inst, 16).unwrap();
        for a in 0..grid.num_cells() {
            for b in (a + 1)..grid.num_cells() {
                if grid.color(a) == grid.color(b) {
                    assert!(grid.cell_chebyshev(a, b) >= 3);
                }
            }
        }
    }

    #[test]
    fn grid_partition_covers_every_node_once() {
        let inst = NetworkInstance::sample(777, Regime::Dense, 9).unwrap();
        let grid = ClusterGrid::build(&inst, 37).unwrap();
        let total: usize = (0..grid.num_cells()).map(|c| grid.members(c).len()).sum();
        assert_eq!(total, 777);
        let mut seen = vec![false; 777];
        for c in 0..grid.num_cells() {
            for &i in grid.members(c) {
                assert!(!seen[i]);
                seen[i] = true;
                assert_eq!(grid.cell_of(&inst, i), c);
            }
        }
    }

    #[test]
    fn halves_union_to_cell_membership() {
        let inst = NetworkInstance::sample(500, Regime::Dense, 2).unwrap();
        let grid = ClusterGrid::build(&inst, 30).unwrap();
        for c in 0..grid.num_cells() {
            let mut want = grid.members(c).to_vec();
            want.sort_unstable();
            for dir in [Direction::XNeg, Direction::XPos, Direction::YNeg, Direction::YPos] {
                let (near, far) = grid.halves(c, dir);
                let mut got: Vec<usize> = near.iter().chain(far.iter()).copied().collect();
                got.sort_unstable();
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn occupancy_on_engineered_lattice_is_exact() {
        // 4 nodes per cell on a 2x2 grid, placed at cell quarter-points.
        let mut positions = Vec::new();
        for cx in 0..2 {
            for cy in 0..2 {
                for (ox, oy) in [(0.2, 0.2), (0.2, 0.4), (0.4, 0.2), (0.4, 0.4)] {
                    positions.push([cx as f64 * 0.5 + ox, cy as f64 * 0.5 + oy]);
                }
            }
        }
        let inst = NetworkInstance::from_positions(Regime::Dense, positions, None, 0).unwrap();
        let grid = ClusterGrid::build(&inst, 4).unwrap();
        let stats = grid.occupancy_stats();
        assert_eq!(stats.min_count, 4);
        assert_eq!(stats.max_count, 4);
    }

    #[test]
    fn occupancy_reports_empty_cell() {
        // All nodes crowded into one corner cell of a 2x2 grid.
        let positions = vec![[0.1, 0.1], [0.2, 0.1], [0.1, 0.2], [0.2, 0.2]];
        let inst = NetworkInstance::from_positions(Regime::Dense, positions, None, 0).unwrap();
        let grid = ClusterGrid::build(&inst, 1).unwrap();
        assert_eq!(grid.num_cells(), 4);
        assert_eq!(grid.occupancy_stats().min_count, 0);
    }

    #[test]
    fn min_distance_two_points() {
        let inst = NetworkInstance::from_positions(Regime::Dense, vec![[0.0, 0.0], [1.0, 1.0]], None, 0).unwrap();
        assert!((inst.min_pairwise_distance() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn min_distance_duplicate_positions_is_zero() {
        let inst =
            NetworkInstance::from_positions(Regime::Dense, vec![[0.3, 0.3], [0.3, 0.3], [0.9, 0.1]], None, 0).unwrap();
        assert_eq!(inst.min_pairwise_distance(), 0.0);
    }

    #[test]
    fn squarelet_checks_require_extended() {
        let dense = NetworkInstance::sample(64, Regime::Dense, 0).unwrap();
        assert!(matches!(dense.squarelet_checks(), Err(Error::InvalidRegime(_))));
    }

    #[test]
    fn squarelet_checks_on_engineered_lattice() {
        // 64 nodes, one per unit squarelet of the 8x8 extended square.
        let mut positions = Vec::new();
        for x in 0..8 {
            for y in 0..8 {
                positions.push([x as f64 + 0.5, y as f64 + 0.5]);
            }
        }
        let inst = NetworkInstance::from_positions(Regime::Extended, positions, None, 0).unwrap();
        let stats = inst.squarelet_checks().unwrap();
        assert_eq!(stats.max_unit_occupancy, 1);
        assert!(stats.all_2logn_occupied);
    }

    #[test]
    fn crossing_count_counts_left_to_right_pairs() {
        // side = 2; nodes 0,1 on the left half, 2,3 on the right.
        let positions = vec![[0.9, 1.0], [0.5, 1.5], [1.8, 0.3], [1.5, 1.9]];
        let inst = NetworkInstance::from_positions(
            Regime::Extended,
            positions,
            Some(vec![2, 3, 0, 1]),
            0,
        )
        .unwrap();
        assert_eq!(inst.squarelet_checks().unwrap().crossing_count, 2);
    }

    #[test]
    fn extended_rescale_preserves_cell_membership() {
        let ext = NetworkInstance::sample(256, Regime::Extended, 4).unwrap();
        let dense = ext.rescaled_dense();
        let ge = ClusterGrid::build(&ext, 16).unwrap();
        let gd = ClusterGrid::build(&dense, 16).unwrap();
        for c in 0..ge.num_cells() {
            assert_eq!(ge.members(c), gd.members(c));
        }
    }

    #[test]
    fn json_round_trip_replays_geometry() {
        let inst = NetworkInstance::sample(40, Regime::Extended, 12).unwrap().with_random_pairing(1);
        let text = inst.to_json().unwrap();
        let back = NetworkInstance::from_json(&text).unwrap();
        assert_eq!(back.n(), 40);
        assert_eq!(back.pairing(), inst.pairing());
        for i in 0..40 {
            let a = inst.position(i);
            let b = back.position(i);
            assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn occupancy_exponent_matches_hand_value() {
        // 1.5 ln 1.5 - 0.5
        assert!((occupancy_exponent(0.5) - 0.108_197_662_162_246_6).abs() < 1e-12);
    }
}
