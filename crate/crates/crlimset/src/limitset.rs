//! Limit-set approximation on the boundary sphere.
//!
//! Two phases: seed with the attractive fixed points of loxodromic words up
//! to length n1, then densify by pushing the cloud around with declared
//! symmetries and all words up to length n2. Points live in the standard
//! ball chart (z1, z2) with |z1|^2 + |z2|^2 = 1; deduplication is a spatial
//! hash on the four real coordinates in the chord metric.

use rayon::prelude::*;
use std::collections::HashMap;
use thiserror::Error;

use crate::config::Tolerances;
use crate::herm::{attractive_lift, ball_chart, BallChart, GroupElement, HermError};
use crate::linalg::{sym4_eigen, Mat3, Vec3, C64, ONE};
use crate::word::{inverse_letter, walk_reduced_products, Alphabet};

#[derive(Debug, Error)]
pub enum LimitsetError {
    #[error("generator set is empty")]
    Empty,
    #[error(transparent)]
    Herm(#[from] HermError),
}

/// Orbit parameters. `symmetries` are extra maps applied between word
/// phases (for triangle groups, the three reflections).
#[derive(Clone, Debug)]
pub struct OrbitConfig {
    pub n1: usize,
    pub n2: usize,
    pub epsilon: f64,
    pub max_points: usize,
    pub rounds: usize,
    pub threads: usize,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        OrbitConfig {
            n1: 8,
            n2: 4,
            epsilon: 1e-3,
            max_points: 2_000_000,
            rounds: 2,
            threads: 1,
        }
    }
}

/// A boundary point in chart coordinates; the third lift coordinate is 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct S3Point {
    pub z1: C64,
    pub z2: C64,
}

impl S3Point {
    pub fn coords(&self) -> [f64; 4] {
        [self.z1.re, self.z1.im, self.z2.re, self.z2.im]
    }

    pub fn dist(&self, other: &S3Point) -> f64 {
        let a = self.coords();
        let b = other.coords();
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }

    fn normalized(z1: C64, z2: C64) -> Option<S3Point> {
        let n = (z1.norm_sqr() + z2.norm_sqr()).sqrt();
        if !n.is_finite() || n == 0.0 {
            return None;
        }
        Some(S3Point {
            z1: z1 / n,
            z2: z2 / n,
        })
    }

    /// Apply a standard-frame matrix to the lift (z1, z2, 1) and rescale.
    pub fn apply(&self, m: &Mat3) -> Option<S3Point> {
        let u = m.mul_vec(&Vec3([self.z1, self.z2, ONE]));
        if u.0[2].norm() < 1e-14 {
            return None;
        }
        S3Point::normalized(u.0[0] / u.0[2], u.0[1] / u.0[2])
    }
}

/// Grid hash over the four chart coordinates with cell size epsilon.
/// Guarantees no two stored points sit within epsilon/2 of each other.
#[derive(Clone, Debug, Default)]
struct SpatialHash {
    cells: HashMap<[i64; 4], Vec<u32>>,
    cell: f64,
}

impl SpatialHash {
    fn new(cell: f64) -> Self {
        SpatialHash {
            cells: HashMap::new(),
            cell,
        }
    }

    fn key(&self, p: &S3Point) -> [i64; 4] {
        let c = p.coords();
        let mut k = [0i64; 4];
        for i in 0..4 {
            k[i] = (c[i] / self.cell).floor() as i64;
        }
        k
    }

    fn visit_near(&self, p: &S3Point, radius_cells: i64, mut f: impl FnMut(u32) -> bool) -> bool {
        let k = self.key(p);
        let mut d = [0i64; 4];
        for d0 in -radius_cells..=radius_cells {
            d[0] = k[0] + d0;
            for d1 in -radius_cells..=radius_cells {
                d[1] = k[1] + d1;
                for d2 in -radius_cells..=radius_cells {
                    d[2] = k[2] + d2;
                    for d3 in -radius_cells..=radius_cells {
                        d[3] = k[3] + d3;
                        if let Some(idx) = self.cells.get(&d) {
                            for &i in idx {
                                if f(i) {
                                    return true;
                                }
                            }
                        }
                    }
                }
            }
        }
        false
    }

    fn push(&mut self, p: &S3Point, index: u32) {
        self.cells.entry(self.key(p)).or_default().push(index);
    }
}

/// Deduplicated cloud of boundary points with provenance counters.
#[derive(Clone, Debug)]
pub struct PointCloud {
    points: Vec<S3Point>,
    hash: SpatialHash,
    pub epsilon: f64,
    pub seed_count: usize,
    pub densified_count: usize,
    pub no_loxodromic: bool,
    pub skipped_degenerate: usize,
}

impl PointCloud {
    pub fn new(epsilon: f64) -> Self {
        PointCloud {
            points: Vec::new(),
            hash: SpatialHash::new(epsilon),
            epsilon,
            seed_count: 0,
            densified_count: 0,
            no_loxodromic: false,
            skipped_degenerate: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[S3Point] {
        &self.points
    }

    /// Insert unless a stored point lies within epsilon/2. Returns whether
    /// the point was kept.
    pub fn insert(&mut self, p: S3Point) -> bool {
        debug_assert!(
            (p.z1.norm_sqr() + p.z2.norm_sqr() - 1.0).abs() < Tolerances::DEFAULT.s3_chart,
            "point off the sphere"
        );
        let reject_radius = self.epsilon * 0.5;
        let found = self.hash.visit_near(&p, 1, |i| {
            self.points[i as usize].dist(&p) < reject_radius
        });
        if found {
            return false;
        }
        let index = self.points.len() as u32;
        self.hash.push(&p, index);
        self.points.push(p);
        true
    }

    pub fn has_neighbor_within(&self, p: &S3Point, dist: f64) -> bool {
        let radius_cells = (dist / self.hash.cell).ceil() as i64;
        self.hash
            .visit_near(p, radius_cells, |i| self.points[i as usize].dist(p) < dist)
    }
}

/// Generators conjugated into the standard frame, ready for orbit work.
pub struct GeneratorSet {
    pub alphabet: Alphabet,
    /// (letter, standard-frame matrix) for each signed letter.
    letters: Vec<(char, Mat3)>,
    symmetries: Vec<Mat3>,
    pub chart: BallChart,
}

impl GeneratorSet {
    /// Conjugates every generator (and optional symmetries) into the
    /// standard frame via the ball chart of their common form.
    pub fn new(
        assignments: &[(char, GroupElement)],
        symmetries: &[GroupElement],
    ) -> Result<Self, LimitsetError> {
        let first = assignments.first().ok_or(LimitsetError::Empty)?;
        let chart = ball_chart(first.1.form())?;
        let mut letters = Vec::new();
        let mut gens = Vec::new();
        for (c, g) in assignments {
            gens.push(*c);
            let std = chart.to_standard(g.matrix());
            letters.push((*c, std));
            letters.push((
                inverse_letter(*c),
                std.inverse().expect("isometries are invertible"),
            ));
        }
        let symmetries = symmetries
            .iter()
            .map(|g| chart.to_standard(g.matrix()))
            .collect();
        Ok(GeneratorSet {
            alphabet: Alphabet::new(&gens),
            letters,
            symmetries,
            chart,
        })
    }

    pub fn letter_matrices(&self) -> &[(char, Mat3)] {
        &self.letters
    }
}

fn run_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    if threads <= 1 {
        f()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool")
            .install(f)
    }
}

/// Phase one: attractive fixed points of loxodromic words up to length n1.
/// An empty result (no loxodromic found) is flagged, not an error.
pub fn seed(generators: &GeneratorSet, cfg: &OrbitConfig) -> PointCloud {
    let mut cloud = PointCloud::new(cfg.epsilon);
    let letters = generators.letter_matrices();
    let classify_tol = Tolerances::DEFAULT.trace_classify;

    // shard by first letter; each shard walks its subtree independently and
    // the results merge in shard order so output is thread-count invariant
    let shards: Vec<(Vec<S3Point>, usize)> = run_pool(cfg.threads, || {
        (0..letters.len())
            .into_par_iter()
            .map(|first| {
                let mut local: Vec<S3Point> = Vec::new();
                let mut skipped = 0usize;
                let (c0, m0) = letters[first];
                let mut handle = |prod: &Mat3| match attractive_lift(prod, classify_tol) {
                    Ok(lift) => {
                        if let Ok(s3) = generators.chart.s3_of_lift(&lift) {
                            if let Some(p) = S3Point::normalized(s3.0, s3.1) {
                                local.push(p);
                            }
                        }
                    }
                    Err(HermError::DegenerateEigenstructure(_)) => {
                        // recovered by nearby words
                        skipped += 1;
                    }
                    Err(_) => {}
                };
                handle(&m0);
                walk_from(letters, cfg.n1, c0, &m0, &mut |_word, prod| {
                    handle(prod);
                    true
                });
                (local, skipped)
            })
            .collect()
    });

    for (local, skipped) in shards {
        cloud.skipped_degenerate += skipped;
        for p in local {
            if cloud.len() >= cfg.max_points {
                break;
            }
            cloud.insert(p);
        }
    }
    cloud.seed_count = cloud.len();
    cloud.no_loxodromic = cloud.is_empty();
    cloud
}

fn walk_from(
    letters: &[(char, Mat3)],
    max_len: usize,
    first: char,
    first_mat: &Mat3,
    visit: &mut impl FnMut(&[char], &Mat3) -> bool,
) {
    fn rec(
        letters: &[(char, Mat3)],
        max_len: usize,
        word: &mut Vec<char>,
        prod: Mat3,
        visit: &mut impl FnMut(&[char], &Mat3) -> bool,
    ) {
        if word.len() >= max_len {
            return;
        }
        for (c, m) in letters {
            if *word.last().unwrap() == inverse_letter(*c) {
                continue;
            }
            let next = prod.mul(m);
            word.push(*c);
            if visit(word, &next) {
                rec(letters, max_len, word, next, visit);
            }
            word.pop();
        }
    }
    let mut word = vec![first];
    rec(letters, max_len, &mut word, *first_mat, visit);
}

/// Phase two: for each round, push the snapshot cloud through the
/// symmetries, then through every reduced word up to length n2.
pub fn densify(mut cloud: PointCloud, generators: &GeneratorSet, cfg: &OrbitConfig) -> PointCloud {
    if cloud.is_empty() {
        return cloud;
    }
    // word matrices up to n2, in enumeration order
    let mut word_mats: Vec<Mat3> = Vec::new();
    walk_reduced_products(generators.letter_matrices(), cfg.n2, &mut |_w, m| {
        word_mats.push(*m);
        true
    });

    for _ in 0..cfg.rounds {
        for phase in 0..2 {
            let maps: &[Mat3] = if phase == 0 {
                &generators.symmetries
            } else {
                &word_mats
            };
            let snapshot = cloud.len();
            for m in maps {
                if cloud.len() >= cfg.max_points {
                    return cloud;
                }
                let images: Vec<Option<S3Point>> = run_pool(cfg.threads, || {
                    cloud.points[..snapshot]
                        .par_iter()
                        .map(|p| p.apply(m))
                        .collect()
                });
                for img in images.into_iter().flatten() {
                    if cloud.len() >= cfg.max_points {
                        return cloud;
                    }
                    if cloud.insert(img) {
                        cloud.densified_count += 1;
                    }
                }
            }
        }
    }
    cloud
}

/// Fraction of points whose image under every generator letter has a cloud
/// neighbor within 2 epsilon. One-sided invariance estimate.
pub fn invariance_score(cloud: &PointCloud, generators: &GeneratorSet) -> f64 {
    if cloud.is_empty() {
        return 0.0;
    }
    let radius = 2.0 * cloud.epsilon;
    let good = cloud
        .points
        .iter()
        .filter(|p| {
            generators.letter_matrices().iter().all(|(_, m)| {
                p.apply(m)
                    .map(|q| cloud.has_neighbor_within(&q, radius))
                    .unwrap_or(false)
            })
        })
        .count();
    good as f64 / cloud.len() as f64
}

/// Heuristic shape tags for a cloud.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CloudTag {
    Elementary,
    RoundCircleCandidate,
    DenseCandidate,
    FractalCandidate,
}

impl std::fmt::Display for CloudTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CloudTag::Elementary => "Elementary",
            CloudTag::RoundCircleCandidate => "RoundCircleCandidate",
            CloudTag::DenseCandidate => "DenseCandidate",
            CloudTag::FractalCandidate => "FractalCandidate",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CloudClass {
    pub tag: CloudTag,
    pub points: usize,
    pub circle_residual: f64,
    pub coverage: f64,
}

/// Thresholds for the cloud classifier.
#[derive(Clone, Copy, Debug)]
pub struct ClassifyConfig {
    /// Max circle-fit residual, in units of epsilon.
    pub circle_residual_factor: f64,
    /// Occupied-cell fraction above which the cloud counts as dense.
    pub coverage_threshold: f64,
    /// Grid pitch for the coverage estimate.
    pub grid_pitch: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            circle_residual_factor: 10.0,
            coverage_threshold: 0.9,
            grid_pitch: 0.05,
        }
    }
}

/// Elementary (at most 2 points), round circle (planar section fit), dense
/// (grid coverage), else fractal.
pub fn classify_cloud(cloud: &PointCloud, cfg: &ClassifyConfig) -> CloudClass {
    let n = cloud.len();
    if n <= 2 {
        return CloudClass {
            tag: CloudTag::Elementary,
            points: n,
            circle_residual: 0.0,
            coverage: 0.0,
        };
    }
    let circle_residual = circle_fit_residual(cloud.points());
    let coverage = coverage_fraction(cloud.points(), cfg.grid_pitch);
    let tag = if circle_residual < cfg.circle_residual_factor * cloud.epsilon {
        CloudTag::RoundCircleCandidate
    } else if coverage > cfg.coverage_threshold {
        CloudTag::DenseCandidate
    } else {
        CloudTag::FractalCandidate
    };
    CloudClass {
        tag,
        points: n,
        circle_residual,
        coverage,
    }
}

/// Round circles on the sphere are sections by affine 2-planes, so the worst
/// distance to the best-fit 2-plane (through the mean, spanned by the top
/// two covariance directions) measures circularity.
fn circle_fit_residual(points: &[S3Point]) -> f64 {
    let n = points.len() as f64;
    let mut mean = [0.0f64; 4];
    for p in points {
        let c = p.coords();
        for i in 0..4 {
            mean[i] += c[i];
        }
    }
    for m in mean.iter_mut() {
        *m /= n;
    }
    let mut cov = [[0.0f64; 4]; 4];
    for p in points {
        let c = p.coords();
        for i in 0..4 {
            for j in 0..4 {
                cov[i][j] += (c[i] - mean[i]) * (c[j] - mean[j]);
            }
        }
    }
    for row in cov.iter_mut() {
        for v in row.iter_mut() {
            *v /= n;
        }
    }
    let (_vals, vecs) = sym4_eigen(cov);
    // residual = distance to the plane: components along the two smallest directions
    let mut worst = 0.0f64;
    for p in points {
        let c = p.coords();
        let mut r2 = 0.0;
        for vec in &vecs[2..4] {
            let mut d = 0.0;
            for i in 0..4 {
                d += (c[i] - mean[i]) * vec[i];
            }
            r2 += d * d;
        }
        worst = worst.max(r2.sqrt());
    }
    worst
}

/// Fraction of sphere-meeting grid cells of the given pitch that contain a
/// cloud point.
fn coverage_fraction(points: &[S3Point], pitch: f64) -> f64 {
    let total = sphere_cell_count(pitch);
    if total == 0 {
        return 0.0;
    }
    let mut occupied = std::collections::HashSet::new();
    for p in points {
        let c = p.coords();
        let mut key = [0i64; 4];
        for i in 0..4 {
            key[i] = (c[i] / pitch).floor() as i64;
        }
        occupied.insert(key);
    }
    occupied.len() as f64 / total as f64
}

/// Number of grid cells that intersect the unit sphere: a cell meets S^3 iff
/// its nearest corner-distance to the origin is <= 1 and its farthest is >= 1.
fn sphere_cell_count(pitch: f64) -> usize {
    let k = (1.0 / pitch).ceil() as i64 + 1;
    let mut count = 0usize;
    fn near_far(lo: f64, hi: f64) -> (f64, f64) {
        let near = if lo <= 0.0 && hi >= 0.0 {
            0.0
        } else {
            lo.abs().min(hi.abs())
        };
        (near, lo.abs().max(hi.abs()))
    }
    for a in -k..k {
        let (n0, f0) = near_far(a as f64 * pitch, (a + 1) as f64 * pitch);
        if n0 > 1.0 {
            continue;
        }
        for b in -k..k {
            let (n1, f1) = near_far(b as f64 * pitch, (b + 1) as f64 * pitch);
            let nn = n0 * n0 + n1 * n1;
            if nn > 1.0 {
                continue;
            }
            for c in -k..k {
                let (n2, f2) = near_far(c as f64 * pitch, (c + 1) as f64 * pitch);
                let nnn = nn + n2 * n2;
                if nnn > 1.0 {
                    continue;
                }
                for d in -k..k {
                    let (n3, f3) = near_far(d as f64 * pitch, (d + 1) as f64 * pitch);
                    if nnn + n3 * n3 > 1.0 {
                        continue;
                    }
                    if f0 * f0 + f1 * f1 + f2 * f2 + f3 * f3 >= 1.0 {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}
