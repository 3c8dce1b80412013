//! Directed-polymer fields on the positive quadrant: stationary ratio
//! recursion, partition-function sums, and a path-enumeration oracle.
//!
//! A field on {0..m}×{0..n} stores the log-ratios log R¹ (horizontal
//! edges) and log R² (vertical edges). Boundary edges carry i.i.d. draws
//! from the stationary laws; each interior site applies the pair map with
//! its own bulk draw Y, so ratios of ratios are taken as log differences
//! and the sum goes through a stabilized log-add. log Z is recovered by
//! summing log-ratios along any up-right path.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{stationary_triple, ModelSpec};
use crate::rng::{derive_seed, rng_from_seed};

/// log(e^a + e^b) without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// log Σ e^{x_i} via the shift-by-max trick.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Dense row-major grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Grid {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Grid {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    /// Nested rows for JSON export.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(|r| r.to_vec()).collect()
    }
}

/// One up-right step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Right,
    Up,
}

/// Simulated ratio field.
///
/// Lattice coordinates: `log_r1(i, j)` for 1 ≤ i ≤ m, 0 ≤ j ≤ n is
/// log R¹ on the horizontal edge into (i, j); `log_r2(i, j)` for
/// 0 ≤ i ≤ m, 1 ≤ j ≤ n is log R² on the vertical edge into (i, j);
/// `log_y(i, j)` is the log of the bulk draw at an interior site.
#[derive(Clone, Debug, Serialize)]
pub struct LatticeField {
    m: usize,
    n: usize,
    log_r1: Grid,
    log_r2: Grid,
    log_y: Grid,
    seed: u64,
    model: ModelSpec,
}

impl LatticeField {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn log_r1(&self, i: usize, j: usize) -> f64 {
        assert!(i >= 1 && i <= self.m && j <= self.n, "R1 index ({i}, {j})");
        self.log_r1.get(i - 1, j)
    }

    pub fn log_r2(&self, i: usize, j: usize) -> f64 {
        assert!(i <= self.m && j >= 1 && j <= self.n, "R2 index ({i}, {j})");
        self.log_r2.get(i, j - 1)
    }

    pub fn log_y(&self, i: usize, j: usize) -> f64 {
        assert!(
            i >= 1 && i <= self.m && j >= 1 && j <= self.n,
            "bulk index ({i}, {j})"
        );
        self.log_y.get(i - 1, j - 1)
    }

    pub fn log_r1_grid(&self) -> &Grid {
        &self.log_r1
    }

    pub fn log_r2_grid(&self) -> &Grid {
        &self.log_r2
    }
}

/// Draw boundary ratios and bulk weights, then sweep the ratio recursion
/// in lexicographic order. Identical seeds give bit-identical fields.
pub fn simulate_field(model: &ModelSpec, m: usize, n: usize, seed: u64) -> Result<LatticeField> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "grid extents must be at least 1, got ({m}, {n})"
        )));
    }
    let triple = stationary_triple(model)?;
    let h = model.h();
    let r1_sampler = triple.r1.sampler();
    let r2_sampler = triple.r2.sampler();
    let y_sampler = triple.y.sampler();

    // Draw order is fixed: boundary R1 row, boundary R2 column, bulk Y in
    // lexicographic order.
    let mut rng = rng_from_seed(seed);
    let mut log_r1 = Grid::zeros(m, n + 1);
    let mut log_r2 = Grid::zeros(m + 1, n);
    let mut log_y = Grid::zeros(m, n);

    for i in 1..=m {
        log_r1.set(i - 1, 0, r1_sampler.sample(&mut rng).ln());
    }
    for j in 1..=n {
        log_r2.set(0, j - 1, r2_sampler.sample(&mut rng).ln());
    }
    for i in 1..=m {
        for j in 1..=n {
            let y = y_sampler.sample(&mut rng);
            let (log_u, log_v) = (y.ln(), h.eval(y).ln());
            let prev1 = log_r1.get(i - 1, j - 1); // log R1 at (i, j−1)
            let prev2 = log_r2.get(i - 1, j - 1); // log R2 at (i−1, j)
            let d = prev1 - prev2;
            let l1 = log_add_exp(log_u, log_v + d);
            let l2 = log_add_exp(log_u - d, log_v);
            if !l1.is_finite() || !l2.is_finite() {
                return Err(Error::Numeric(format!(
                    "ratio recursion overflowed at site ({i}, {j})"
                )));
            }
            log_r1.set(i - 1, j, l1);
            log_r2.set(i, j - 1, l2);
            log_y.set(i - 1, j - 1, log_u);
        }
    }

    Ok(LatticeField {
        m,
        n,
        log_r1,
        log_r2,
        log_y,
        seed,
        model: *model,
    })
}

/// log Z at (i, j): up the left column, then across row j. Any up-right
/// path gives the same value; log Z(0, 0) = 0.
pub fn log_z(field: &LatticeField, i: usize, j: usize) -> Result<f64> {
    if i > field.m || j > field.n {
        return Err(Error::OutOfRange(format!(
            "({i}, {j}) outside the {}×{} field",
            field.m, field.n
        )));
    }
    let mut acc = 0.0;
    for jj in 1..=j {
        acc += field.log_r2(0, jj);
    }
    for ii in 1..=i {
        acc += field.log_r1(ii, j);
    }
    Ok(acc)
}

/// log Z along an explicit up-right step sequence from the origin.
pub fn log_z_along(field: &LatticeField, steps: &[Step]) -> Result<f64> {
    let (mut i, mut j) = (0usize, 0usize);
    let mut acc = 0.0;
    for s in steps {
        match s {
            Step::Right => i += 1,
            Step::Up => j += 1,
        }
        if i > field.m || j > field.n {
            return Err(Error::OutOfRange(format!(
                "path leaves the {}×{} field at ({i}, {j})",
                field.m, field.n
            )));
        }
        acc += match s {
            Step::Right => field.log_r1(i, j),
            Step::Up => field.log_r2(i, j),
        };
    }
    Ok(acc)
}

/// Explicit log edge weights for oracle computations.
///
/// `log_horiz(i, j)` is the log-weight on the horizontal edge into (i, j);
/// `log_vert(i, j)` on the vertical edge into (i, j).
#[derive(Clone, Debug)]
pub struct EdgeWeights {
    m: usize,
    n: usize,
    log_horiz: Grid,
    log_vert: Grid,
}

impl EdgeWeights {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Every weight equal to one: the partition function counts paths.
    pub fn all_ones(m: usize, n: usize) -> Self {
        Self {
            m,
            n,
            log_horiz: Grid::zeros(m, n + 1),
            log_vert: Grid::zeros(m + 1, n),
        }
    }

    /// Build from closures giving log-weights in lattice coordinates.
    pub fn from_fn(
        m: usize,
        n: usize,
        mut horiz: impl FnMut(usize, usize) -> f64,
        mut vert: impl FnMut(usize, usize) -> f64,
    ) -> Self {
        let mut w = Self::all_ones(m, n);
        for i in 1..=m {
            for j in 0..=n {
                w.log_horiz.set(i - 1, j, horiz(i, j));
            }
        }
        for i in 0..=m {
            for j in 1..=n {
                w.log_vert.set(i, j - 1, vert(i, j));
            }
        }
        w
    }

    /// The edge weights a simulated field realizes: boundary edges carry
    /// the boundary ratio draws, interior horizontal edges carry u = Y and
    /// vertical edges carry v = h(Y).
    pub fn from_field(field: &LatticeField) -> Self {
        let h = field.model().h();
        Self::from_fn(
            field.m(),
            field.n(),
            |i, j| {
                if j == 0 {
                    field.log_r1(i, 0)
                } else {
                    field.log_y(i, j)
                }
            },
            |i, j| {
                if i == 0 {
                    field.log_r2(0, j)
                } else {
                    h.eval(field.log_y(i, j).exp()).ln()
                }
            },
        )
    }

    pub fn log_horiz(&self, i: usize, j: usize) -> f64 {
        assert!(i >= 1 && i <= self.m && j <= self.n);
        self.log_horiz.get(i - 1, j)
    }

    pub fn log_vert(&self, i: usize, j: usize) -> f64 {
        assert!(i <= self.m && j >= 1 && j <= self.n);
        self.log_vert.get(i, j - 1)
    }
}

/// log Z at (i, j) by the partition recursion swept in log space.
pub fn recursion_logz(w: &EdgeWeights, i: usize, j: usize) -> Result<f64> {
    if i > w.m || j > w.n {
        return Err(Error::OutOfRange(format!(
            "({i}, {j}) outside the {}×{} grid",
            w.m, w.n
        )));
    }
    let mut z = Grid::zeros(i + 1, j + 1);
    for ii in 1..=i {
        z.set(ii, 0, z.get(ii - 1, 0) + w.log_horiz(ii, 0));
    }
    for jj in 1..=j {
        z.set(0, jj, z.get(0, jj - 1) + w.log_vert(0, jj));
    }
    for ii in 1..=i {
        for jj in 1..=j {
            let from_left = w.log_horiz(ii, jj) + z.get(ii - 1, jj);
            let from_below = w.log_vert(ii, jj) + z.get(ii, jj - 1);
            z.set(ii, jj, log_add_exp(from_left, from_below));
        }
    }
    Ok(z.get(i, j))
}

/// Path-enumeration cap: C(20, 10) paths is the largest oracle run.
pub const BRUTE_FORCE_CAP: usize = 20;

/// log Z at (i, j) by enumerating every up-right path and accumulating
/// the products in log space.
pub fn brute_force_logz(w: &EdgeWeights, i: usize, j: usize) -> Result<f64> {
    if i > w.m || j > w.n {
        return Err(Error::OutOfRange(format!(
            "({i}, {j}) outside the {}×{} grid",
            w.m, w.n
        )));
    }
    if i + j > BRUTE_FORCE_CAP {
        return Err(Error::SizeCap(format!(
            "path enumeration needs i + j ≤ {BRUTE_FORCE_CAP}, got {}",
            i + j
        )));
    }
    if i + j == 0 {
        return Ok(0.0);
    }
    let mut sums = Vec::new();
    collect_paths(w, 0, 0, i, j, 0.0, &mut sums);
    Ok(log_sum_exp(&sums))
}

fn collect_paths(
    w: &EdgeWeights,
    i: usize,
    j: usize,
    ti: usize,
    tj: usize,
    acc: f64,
    out: &mut Vec<f64>,
) {
    if i == ti && j == tj {
        out.push(acc);
        return;
    }
    if i < ti {
        collect_paths(w, i + 1, j, ti, tj, acc + w.log_horiz(i + 1, j), out);
    }
    if j < tj {
        collect_paths(w, i, j + 1, ti, tj, acc + w.log_vert(i, j + 1), out);
    }
}

/// One (R¹, R²) draw at `site` per replica, each replica on its own
/// derived stream and simulated only up to the rectangle containing the
/// site. Replicas run in parallel.
pub fn interior_ratio_samples(
    model: &ModelSpec,
    site: (usize, usize),
    replicas: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    let (i, j) = site;
    if i == 0 || j == 0 {
        return Err(Error::Domain(format!(
            "site ({i}, {j}) is not interior"
        )));
    }
    if replicas == 0 {
        return Err(Error::InvalidParameter("need at least one replica".into()));
    }
    (0..replicas)
        .into_par_iter()
        .map(|k| {
            let field = simulate_field(model, i, j, derive_seed(seed, k as u64))?;
            Ok((field.log_r1(i, j).exp(), field.log_r2(i, j).exp()))
        })
        .collect()
}

/// log Z at the corner of an m×n field, one value per replica.
pub fn log_z_replicas(
    model: &ModelSpec,
    m: usize,
    n: usize,
    replicas: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    (0..replicas)
        .into_par_iter()
        .map(|k| {
            let field = simulate_field(model, m, n, derive_seed(seed, k as u64))?;
            log_z(&field, m, n)
        })
        .collect()
}
