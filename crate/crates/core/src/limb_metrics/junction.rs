use crate::cloud_geom::{PointCloud, Vec3};
use crate::error::{Error, Result};

/// Dense voxel grid over a point set for exact nearest-distance queries.
struct NearestGrid<'a> {
    points: &'a [Vec3],
    cell: f64,
    lo: Vec3,
    hi: Vec3,
    dims: [i64; 3],
    /// Point indices grouped by cell; cell `k` owns `order[start[k]..start[k + 1]]`.
    start: Vec<usize>,
    order: Vec<usize>,
}

impl<'a> NearestGrid<'a> {
    fn new(points: &'a [Vec3]) -> Self {
        let (lo, hi) = points.iter().fold(
            (Vec3::repeat(f64::INFINITY), Vec3::repeat(f64::NEG_INFINITY)),
            |(lo, hi), p| (lo.inf(p), hi.sup(p)),
        );
        let ext = hi - lo;
        // About one point per cell for surface-like data, and never more
        // cells than a few times the point count.
        let n = points.len() as f64;
        let mut cell = (ext.amax() / n.sqrt()).max(1e-3);
        let count = |c: f64| ext.iter().map(|e| (e / c).floor() + 1.0).product::<f64>();
        while count(cell) > 4.0 * n + 64.0 {
            cell *= 1.5;
        }
        let dims = [0, 1, 2].map(|i| (ext[i] / cell).floor() as i64 + 1);
        let total = (dims[0] * dims[1] * dims[2]) as usize;

        let mut grid = NearestGrid { points, cell, lo, hi, dims, start: vec![0; total + 1], order: Vec::new() };
        let keys: Vec<usize> = points.iter().map(|p| grid.flat(grid.key_of(p))).collect();
        for &k in &keys {
            grid.start[k + 1] += 1;
        }
        for k in 0..total {
            grid.start[k + 1] += grid.start[k];
        }
        let mut fill = grid.start.clone();
        grid.order = vec![0; points.len()];
        for (i, &k) in keys.iter().enumerate() {
            grid.order[fill[k]] = i;
            fill[k] += 1;
        }
        grid
    }

    fn key_of(&self, p: &Vec3) -> [i64; 3] {
        let r = (p - self.lo) / self.cell;
        [0, 1, 2].map(|i| (r[i].floor() as i64).clamp(0, self.dims[i] - 1))
    }

    fn flat(&self, k: [i64; 3]) -> usize {
        ((k[0] * self.dims[1] + k[1]) * self.dims[2] + k[2]) as usize
    }

    /// Squared distance from `q` to its nearest indexed point, or some value
    /// `>= bound` when that distance is not below `bound`.
    fn nearest_sq(&self, q: &Vec3, bound: f64) -> f64 {
        let gap = (self.lo - q).sup(&(q - self.hi)).sup(&Vec3::zeros());
        let box_sq = gap.norm_squared();
        if box_sq >= bound {
            return box_sq;
        }
        // Searching from the clamped cell is exact: the offset to the box is
        // orthogonal to every in-box displacement along the clamped axes.
        let c = self.key_of(q);
        let max_ring = self.dims.iter().copied().max().unwrap_or(1);
        let mut best = f64::INFINITY;
        for ring in 0..=max_ring {
            self.visit_ring(c, ring, |i| {
                let d = (self.points[i] - q).norm_squared();
                if d < best {
                    best = d;
                }
            });
            // Unvisited points are at least `ring · cell` away within the box.
            let reach = ring as f64 * self.cell;
            let reach_sq = box_sq + reach * reach;
            if best <= reach_sq || bound <= reach_sq {
                break;
            }
        }
        best
    }

    fn visit_ring(&self, c: [i64; 3], r: i64, mut f: impl FnMut(usize)) {
        let range = |i: usize| (c[i] - r).max(0)..=(c[i] + r).min(self.dims[i] - 1);
        for x in range(0) {
            let x_edge = (x - c[0]).abs() == r;
            for y in range(1) {
                let edge = x_edge || (y - c[1]).abs() == r;
                let mut visit = |z: i64| {
                    let k = self.flat([x, y, z]);
                    self.order[self.start[k]..self.start[k + 1]].iter().for_each(|&i| f(i));
                };
                if edge {
                    range(2).for_each(&mut visit);
                } else {
                    if c[2] - r >= 0 {
                        visit(c[2] - r);
                    }
                    if r > 0 && c[2] + r < self.dims[2] {
                        visit(c[2] + r);
                    }
                }
            }
        }
    }
}

/// Relative slack under which two squared distances count as tied.
const TIE_REL: f64 = 1e-9;

/// Indices of the branch points closest to the trunk, ascending. Distances
/// within a relative `TIE_REL` of the minimum are treated as tied so the
/// choice does not hinge on rounding.
pub(crate) fn nearest_branch_indices(branch: &[Vec3], trunk: &[Vec3]) -> Vec<usize> {
    let grid = NearestGrid::new(trunk);
    let mut dists = Vec::with_capacity(branch.len());
    let mut min = f64::INFINITY;
    for p in branch {
        // The bound stays strictly above the final tie limit, so every
        // value at or under that limit is exact.
        let d = grid.nearest_sq(p, min * (1.0 + 2.0 * TIE_REL) + 2.0 * f64::MIN_POSITIVE);
        min = min.min(d);
        dists.push(d);
    }
    let limit = min * (1.0 + TIE_REL) + f64::MIN_POSITIVE;
    (0..branch.len()).filter(|&i| dists[i] <= limit).collect()
}

/// Finds the trunk-branch junction and orients `axis` so it points from the
/// junction into the branch.
///
/// The junction is the branch point nearest to the trunk cloud, or the mean
/// of the nearest points when several tie.
pub fn locate_junction(branch: &PointCloud, trunk: &PointCloud, axis: &Vec3) -> Result<(Vec3, Vec3)> {
    if branch.is_empty() || trunk.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let tied = nearest_branch_indices(branch.points(), trunk.points());
    let sum = tied.iter().fold(Vec3::zeros(), |acc, &i| acc + branch.points()[i]);
    let junction = sum / tied.len() as f64;
    Ok((junction, orient_away(branch, &junction, axis)))
}

pub(crate) fn orient_away(branch: &PointCloud, junction: &Vec3, axis: &Vec3) -> Vec3 {
    let centroid = branch.centroid().unwrap_or(*junction);
    let a = axis.normalize();
    if (centroid - junction).dot(&a) < 0.0 {
        -a
    } else {
        a
    }
}
