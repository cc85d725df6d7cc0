//! Poisson deployments in a disk and nearest-BS association.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson, UnitDisc};

use crate::model::NetworkConfig;
use crate::{Error, Result};

/// Smallest accepted expected BS count in the window.
pub const MIN_EXPECTED_BS: f64 = 20.0;

const MAX_RESAMPLES: u32 = 1000;

pub type Point = [f64; 2];

#[inline]
fn dist2(a: Point, b: Point) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

/// Uniform bucket grid over `[-w, w]^2` for nearest-neighbour queries.
#[derive(Debug, Clone, Default)]
struct BucketGrid {
    origin: f64,
    cell: f64,
    side: usize,
    starts: Vec<u32>,
    members: Vec<u32>,
    fill: Vec<u32>,
}

impl BucketGrid {
    fn rebuild(&mut self, points: &[Point], half_width: f64, cell: f64) {
        self.origin = -half_width;
        self.side = ((2.0 * half_width / cell).ceil() as usize).max(1);
        self.cell = 2.0 * half_width / self.side as f64;
        let cells = self.side * self.side;
        self.starts.clear();
        self.starts.resize(cells + 1, 0);
        for &p in points {
            let c = self.cell_of(p);
            self.starts[c + 1] += 1;
        }
        for c in 0..cells {
            self.starts[c + 1] += self.starts[c];
        }
        self.members.clear();
        self.members.resize(points.len(), 0);
        self.fill.clear();
        self.fill.extend_from_slice(&self.starts[..cells]);
        for (i, &p) in points.iter().enumerate() {
            let c = self.cell_of(p);
            self.members[self.fill[c] as usize] = i as u32;
            self.fill[c] += 1;
        }
    }

    #[inline]
    fn coord(&self, v: f64) -> usize {
        let c = ((v - self.origin) / self.cell).floor();
        (c.max(0.0) as usize).min(self.side - 1)
    }

    #[inline]
    fn cell_of(&self, p: Point) -> usize {
        self.coord(p[1]) * self.side + self.coord(p[0])
    }

    /// Index of the point nearest to `q`, ties going to the lower index.
    fn nearest(&self, points: &[Point], q: Point) -> Option<usize> {
        if points.is_empty() {
            return None;
        }
        let (cx, cy) = (self.coord(q[0]) as isize, self.coord(q[1]) as isize);
        let side = self.side as isize;
        let mut best = (f64::INFINITY, usize::MAX);
        for ring in 0..side {
            let visit = |x: isize, y: isize, best: &mut (f64, usize)| {
                if x < 0 || y < 0 || x >= side || y >= side {
                    return;
                }
                let c = (y * side + x) as usize;
                for &m in &self.members[self.starts[c] as usize..self.starts[c + 1] as usize] {
                    let m = m as usize;
                    let d = dist2(points[m], q);
                    if d < best.0 || (d == best.0 && m < best.1) {
                        *best = (d, m);
                    }
                }
            };
            if ring == 0 {
                visit(cx, cy, &mut best);
            } else {
                for x in cx - ring..=cx + ring {
                    visit(x, cy - ring, &mut best);
                    visit(x, cy + ring, &mut best);
                }
                for y in cy - ring + 1..cy + ring {
                    visit(cx - ring, y, &mut best);
                    visit(cx + ring, y, &mut best);
                }
            }
            let reach = ring as f64 * self.cell;
            if best.1 != usize::MAX && best.0 <= reach * reach {
                break;
            }
        }
        Some(best.1)
    }
}

/// One sampled network seen from a tagged user at the origin.
#[derive(Debug, Clone, Default)]
pub struct Realization {
    pub bs_points: Vec<Point>,
    /// Users other than the tagged one.
    pub user_points: Vec<Point>,
    /// Nearest BS of each entry of `user_points`.
    pub user_serving: Vec<u32>,
    /// Users associated with each BS, the tagged user included.
    pub bs_load: Vec<u32>,
    pub serving_bs: usize,
    /// Other users sharing the serving BS.
    pub cell_user_count: u32,
    pub window_radius: f64,
    /// Draws discarded because they contained no BS.
    pub resamples: u32,
    grid: BucketGrid,
}

impl Realization {
    pub fn tagged_user(&self) -> Point {
        [0.0, 0.0]
    }

    pub fn serving_distance(&self) -> f64 {
        dist2(self.bs_points[self.serving_bs], self.tagged_user()).sqrt()
    }

    /// A BS transmits when at least one user is associated with it.
    pub fn is_loaded(&self, bs: usize) -> bool {
        self.bs_load[bs] > 0
    }

    /// Index of the BS nearest to `p`.
    pub fn nearest_bs(&self, p: Point) -> Option<usize> {
        self.grid.nearest(&self.bs_points, p)
    }

    /// Redraws every point in place, reusing the buffers.
    pub fn resample<R: Rng + ?Sized>(&mut self, cfg: &NetworkConfig, window_radius: f64, rng: &mut R) -> Result<()> {
        check_window(cfg, window_radius)?;
        let area = PI * window_radius * window_radius;
        let bs_count = Poisson::new(cfg.lambda_b * area).map_err(|e| Error::config(format!("BS count: {e}")))?;
        let user_count = Poisson::new(cfg.lambda_u * area).map_err(|e| Error::config(format!("user count: {e}")))?;
        self.window_radius = window_radius;
        self.resamples = 0;
        loop {
            fill_disk(&mut self.bs_points, bs_count.sample(rng) as usize, window_radius, rng);
            if !self.bs_points.is_empty() {
                break;
            }
            self.resamples += 1;
            if self.resamples >= MAX_RESAMPLES {
                return Err(Error::config("window keeps coming up without base stations"));
            }
        }
        fill_disk(&mut self.user_points, user_count.sample(rng) as usize, window_radius, rng);

        self.grid
            .rebuild(&self.bs_points, window_radius, 1.0 / cfg.lambda_b.sqrt());
        self.serving_bs = self.grid.nearest(&self.bs_points, [0.0, 0.0]).unwrap_or(0);
        self.bs_load.clear();
        self.bs_load.resize(self.bs_points.len(), 0);
        self.bs_load[self.serving_bs] = 1;
        self.user_serving.clear();
        for &u in &self.user_points {
            let b = self.grid.nearest(&self.bs_points, u).unwrap_or(0);
            self.user_serving.push(b as u32);
            self.bs_load[b] += 1;
        }
        self.cell_user_count = self.bs_load[self.serving_bs] - 1;
        Ok(())
    }
}

fn fill_disk<R: Rng + ?Sized>(out: &mut Vec<Point>, count: usize, radius: f64, rng: &mut R) {
    out.clear();
    out.extend((0..count).map(|_| {
        let [x, y]: [f64; 2] = UnitDisc.sample(rng);
        [x * radius, y * radius]
    }));
}

fn check_window(cfg: &NetworkConfig, window_radius: f64) -> Result<()> {
    cfg.validate()?;
    if !(window_radius > 0.0 && window_radius.is_finite()) {
        return Err(Error::config(format!("window radius must be > 0, got {window_radius}")));
    }
    let expected = cfg.lambda_b * PI * window_radius * window_radius;
    if expected < MIN_EXPECTED_BS {
        return Err(Error::config(format!(
            "window of radius {window_radius} holds {expected:.1} BSs on average; need at least {MIN_EXPECTED_BS}"
        )));
    }
    Ok(())
}

/// Samples BSs and users as independent Poisson processes on the disk of
/// radius `window_radius`, puts the tagged user at the origin and associates
/// everyone with the nearest BS.
pub fn sample_realization<R: Rng + ?Sized>(cfg: &NetworkConfig, window_radius: f64, rng: &mut R) -> Result<Realization> {
    let mut real = Realization::default();
    real.resample(cfg, window_radius, rng)?;
    Ok(real)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Scenario;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn brute_nearest(points: &[Point], q: Point) -> usize {
        let mut best = 0;
        for i in 1..points.len() {
            if dist2(points[i], q) < dist2(points[best], q) {
                best = i;
            }
        }
        best
    }

    #[test]
    fn grid_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut pts = Vec::new();
        fill_disk(&mut pts, 300, 9.0, &mut rng);
        let mut grid = BucketGrid::default();
        grid.rebuild(&pts, 9.0, 0.7);
        let mut queries = Vec::new();
        fill_disk(&mut queries, 2000, 9.0, &mut rng);
        for q in queries {
            assert_eq!(grid.nearest(&pts, q), Some(brute_nearest(&pts, q)));
        }
    }

    #[test]
    fn sparse_grid_still_exact() {
        let pts = [[8.0, 8.0], [-7.5, 0.0]];
        let mut grid = BucketGrid::default();
        grid.rebuild(&pts, 10.0, 0.5);
        assert_eq!(grid.nearest(&pts, [9.0, -9.0]), Some(0));
        assert_eq!(grid.nearest(&pts, [-9.0, 9.0]), Some(1));
    }

    #[test]
    fn association_invariants() {
        let cfg = NetworkConfig::new(1.0, 4.0, 1.0, 0.0, 4.0, Scenario::AllBsActive).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let real = sample_realization(&cfg, 6.0, &mut rng).unwrap();
        assert_eq!(real.serving_bs, brute_nearest(&real.bs_points, [0.0, 0.0]));
        let in_cell = real
            .user_serving
            .iter()
            .filter(|&&b| b as usize == real.serving_bs)
            .count();
        assert_eq!(in_cell as u32, real.cell_user_count);
        for (u, &b) in real.user_points.iter().zip(&real.user_serving) {
            assert_eq!(b as usize, brute_nearest(&real.bs_points, *u));
        }
        let total: u32 = real.bs_load.iter().sum();
        assert_eq!(total as usize, real.user_points.len() + 1);
    }

    #[test]
    fn small_window_rejected() {
        let cfg = NetworkConfig::interference_limited(1.0, Scenario::AllBsActive).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(sample_realization(&cfg, 2.0, &mut rng), Err(Error::Config(_))));
    }
}
