//! Eigenvalue computation and tolerance-aware algebra on finite spectra.
//!
//! A [`SpectrumSet`] stores a raw eigenvalue multiset. Set operations work on
//! its *representatives*: single-linkage clusters of radius
//! `cluster_radius`, each replaced by its centroid. The centroid of a cluster
//! produced by rounding a Jordan block is accurate to working precision even
//! though the individual eigenvalues scatter at `O(eps^(1/k))`.

use nalgebra::{Hessenberg, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{OuError, Result};
use crate::linalg::Mat;

/// Default single-linkage radius.
pub const DEFAULT_CLUSTER_RADIUS: f64 = 1e-7;

/// Finite multiset of complex eigenvalues with set semantics up to a radius.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSet {
    points: Vec<Complex64>,
    cluster_radius: f64,
}

/// Serializable complex point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Point {
    fn from(z: Complex64) -> Self {
        Point { re: z.re, im: z.im }
    }
}

impl From<Point> for Complex64 {
    fn from(p: Point) -> Self {
        Complex64::new(p.re, p.im)
    }
}

#[derive(Serialize, Deserialize)]
struct SpectrumSetRepr {
    cluster_radius: f64,
    points: Vec<Point>,
}

impl Serialize for SpectrumSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpectrumSetRepr {
            cluster_radius: self.cluster_radius,
            points: self.points.iter().map(|&z| z.into()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpectrumSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SpectrumSetRepr::deserialize(d)?;
        if !(repr.cluster_radius > 0.0) {
            return Err(serde::de::Error::custom("cluster_radius must be positive"));
        }
        Ok(SpectrumSet::new(repr.points.into_iter().map(Into::into).collect(), repr.cluster_radius))
    }
}

fn cmp_complex(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

impl SpectrumSet {
    /// Sorts the points by `(Re, Im)`. A non-positive radius is replaced by
    /// [`DEFAULT_CLUSTER_RADIUS`].
    pub fn new(mut points: Vec<Complex64>, cluster_radius: f64) -> Self {
        points.sort_by(cmp_complex);
        let cluster_radius = if cluster_radius > 0.0 { cluster_radius } else { DEFAULT_CLUSTER_RADIUS };
        Self { points, cluster_radius }
    }

    pub fn from_real(points: &[f64], cluster_radius: f64) -> Self {
        Self::new(points.iter().map(|&x| Complex64::new(x, 0.0)).collect(), cluster_radius)
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn cluster_radius(&self) -> f64 {
        self.cluster_radius
    }

    pub fn with_radius(mut self, cluster_radius: f64) -> Self {
        if cluster_radius > 0.0 {
            self.cluster_radius = cluster_radius;
        }
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Cluster centroids, sorted by `(Re, Im)`.
    pub fn representatives(&self) -> Vec<Complex64> {
        self.clusters().into_iter().map(|(z, _)| z).collect()
    }

    /// Cluster centroids with the number of points in each cluster.
    pub fn clusters(&self) -> Vec<(Complex64, usize)> {
        let r = self.cluster_radius;
        single_linkage(&self.points, r, |a, b| (a - b).norm() <= r)
    }

    /// The set of representatives as a new spectrum with the same radius.
    pub fn clustered(&self) -> SpectrumSet {
        SpectrumSet::new(self.representatives(), self.cluster_radius)
    }

    /// Multiset union; the larger radius wins.
    pub fn union(&self, other: &SpectrumSet) -> SpectrumSet {
        let mut pts = self.points.clone();
        pts.extend_from_slice(&other.points);
        SpectrumSet::new(pts, self.cluster_radius.max(other.cluster_radius))
    }

    /// Points with `Re >= re_min` and `|Im| <= im_max`.
    pub fn restrict(&self, re_min: f64, im_max: f64) -> SpectrumSet {
        let pts = self.points.iter().copied().filter(|z| z.re >= re_min && z.im.abs() <= im_max).collect();
        SpectrumSet::new(pts, self.cluster_radius)
    }

    /// Distance from `z` to the nearest representative.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        self.representatives().iter().map(|&w| (w - z).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Largest real part among the points.
    pub fn max_re(&self) -> Option<f64> {
        self.points.iter().map(|z| z.re).reduce(f64::max)
    }

    /// Largest modulus among the points.
    pub fn spectral_radius(&self) -> f64 {
        self.points.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// CSV with header `re,im`, one representative per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im\n");
        for z in self.representatives() {
            out.push_str(&format!("{:.17e},{:.17e}\n", z.re, z.im));
        }
        out
    }
}

/// Single-linkage clusters of `points` (sorted by `Re`) under the relation
/// `link`, which must never hold for points farther apart than `reach`.
/// Returns centroids with cluster sizes, sorted by `(Re, Im)`.
fn single_linkage(points: &[Complex64], reach: f64, link: impl Fn(Complex64, Complex64) -> bool) -> Vec<(Complex64, usize)> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if points[j].re - points[i].re > reach {
                break;
            }
            if link(points[i], points[j]) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj] = ri;
                }
            }
        }
    }
    let mut sums: Vec<(Complex64, usize)> = vec![(Complex64::new(0.0, 0.0), 0); n];
    for i in 0..n {
        let r = find(&mut parent, i);
        sums[r].0 += points[i];
        sums[r].1 += 1;
    }
    let mut reps: Vec<(Complex64, usize)> = sums.into_iter().filter(|(_, c)| *c > 0).map(|(s, c)| (s / c as f64, c)).collect();
    reps.sort_by(|a, b| cmp_complex(&a.0, &b.0));
    reps
}

/// Full complex eigenvalue multiset of a square real matrix.
pub fn eig(m: &Mat) -> Result<SpectrumSet> {
    eig_with_radius(m, DEFAULT_CLUSTER_RADIUS)
}

pub fn eig_with_radius(m: &Mat, cluster_radius: f64) -> Result<SpectrumSet> {
    Ok(SpectrumSet::new(schur_eigenvalues(m)?.0, cluster_radius))
}

/// Deflation thresholds tried in turn; the real Schur iteration occasionally
/// stalls at machine precision on matrices with many repeated eigenvalues.
const SCHUR_EPS_LADDER: [f64; 6] = [1.0, 4.0, 16.0, 64.0, 256.0, 1024.0];

/// Eigenvalues and the relative deflation threshold that produced them.
/// When the real Schur iteration stalls or yields non-finite values on every
/// threshold, the Hessenberg form is handed to [`francis_eigenvalues`].
fn schur_eigenvalues(m: &Mat) -> Result<(Vec<Complex64>, f64)> {
    if m.nrows() != m.ncols() {
        return Err(OuError::DimensionMismatch(format!("eig of a {}x{} matrix", m.nrows(), m.ncols())));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(OuError::EigFailure);
    }
    if m.is_empty() {
        return Ok((Vec::new(), f64::EPSILON));
    }
    let finite = |vals: &[Complex64]| vals.iter().all(|z| z.re.is_finite() && z.im.is_finite());
    for factor in SCHUR_EPS_LADDER {
        let eps = factor * f64::EPSILON;
        if let Some(schur) = Schur::try_new(m.clone(), eps, 300 * m.nrows()) {
            // the 2x2 block formula can produce NaN on nearly defective blocks
            let vals: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
            if finite(&vals) {
                return Ok((vals, eps));
            }
        }
    }
    let h = Hessenberg::new(m.clone()).unpack_h();
    match francis_eigenvalues(h) {
        Some(vals) if finite(&vals) => Ok((vals, f64::EPSILON)),
        _ => Err(OuError::EigFailure),
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Implicit double-shift QR on an upper Hessenberg matrix, with an
/// exceptional shift every tenth iteration on the same eigenvalue so that
/// symmetric configurations cannot cycle. Returns `None` after 60 sweeps
/// without a deflation.
fn francis_eigenvalues(mut a: Mat) -> Option<Vec<Complex64>> {
    let n = a.nrows();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }
    let mut nn = n as isize - 1;
    let mut shift = 0.0;
    let mut its = 0;
    while nn >= 0 {
        let nu = nn as usize;
        // smallest l with a negligible subdiagonal entry a[l][l-1]
        let mut l = nu;
        while l >= 1 {
            let mut s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
            if s == 0.0 {
                s = anorm;
            }
            if a[(l, l - 1)].abs() + s == s {
                a[(l, l - 1)] = 0.0;
                break;
            }
            l -= 1;
        }
        let mut x = a[(nu, nu)];
        if l == nu {
            out[nu] = Complex64::new(x + shift, 0.0);
            nn -= 1;
            its = 0;
            continue;
        }
        let mut y = a[(nu - 1, nu - 1)];
        let mut w = a[(nu, nu - 1)] * a[(nu - 1, nu)];
        if l == nu - 1 {
            let p = 0.5 * (y - x);
            let q = p * p + w;
            let z = q.abs().sqrt();
            x += shift;
            if q >= 0.0 {
                let z = p + sign(z, p);
                let lo = x + z;
                let hi = if z != 0.0 { x - w / z } else { lo };
                out[nu - 1] = Complex64::new(lo, 0.0);
                out[nu] = Complex64::new(hi, 0.0);
            } else {
                out[nu - 1] = Complex64::new(x + p, z);
                out[nu] = Complex64::new(x + p, -z);
            }
            nn -= 2;
            its = 0;
            continue;
        }
        if its == 60 {
            return None;
        }
        if its > 0 && its % 10 == 0 {
            shift += x;
            for i in 0..=nu {
                a[(i, i)] -= x;
            }
            let s = a[(nu, nu - 1)].abs() + a[(nu - 1, nu - 2)].abs();
            x = 0.75 * s;
            y = x;
            w = -0.4375 * s * s;
        }
        its += 1;

        // two consecutive small subdiagonals: start of the bulge
        let mut m = nu - 2;
        let (mut p, mut q, mut r);
        loop {
            let z = a[(m, m)];
            let rr = x - z;
            let ss = y - z;
            p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
            q = a[(m + 1, m + 1)] - z - rr - ss;
            r = a[(m + 2, m + 1)];
            let s = p.abs() + q.abs() + r.abs();
            p /= s;
            q /= s;
            r /= s;
            if m == l {
                break;
            }
            let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
            let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
            if u + v == v {
                break;
            }
            m -= 1;
        }
        for i in m + 2..=nu {
            a[(i, i - 2)] = 0.0;
            if i != m + 2 {
                a[(i, i - 3)] = 0.0;
            }
        }
        // chase the bulge
        for k in m..nu {
            let mut scale = 0.0;
            if k != m {
                p = a[(k, k - 1)];
                q = a[(k + 1, k - 1)];
                r = if k + 1 != nu { a[(k + 2, k - 1)] } else { 0.0 };
                scale = p.abs() + q.abs() + r.abs();
                if scale != 0.0 {
                    p /= scale;
                    q /= scale;
                    r /= scale;
                }
            }
            let s = sign((p * p + q * q + r * r).sqrt(), p);
            if s == 0.0 {
                continue;
            }
            if k == m {
                if l != m {
                    a[(k, k - 1)] = -a[(k, k - 1)];
                }
            } else {
                a[(k, k - 1)] = -s * scale;
            }
            p += s;
            let (vx, vy, vz) = (p / s, q / s, r / s);
            q /= p;
            r /= p;
            for j in k..=nu {
                let mut t = a[(k, j)] + q * a[(k + 1, j)];
                if k + 1 != nu {
                    t += r * a[(k + 2, j)];
                    a[(k + 2, j)] -= t * vz;
                }
                a[(k + 1, j)] -= t * vy;
                a[(k, j)] -= t * vx;
            }
            for i in l..=nu.min(k + 3) {
                let mut t = vx * a[(i, k)] + vy * a[(i, k + 1)];
                if k + 1 != nu {
                    t += vz * a[(i, k + 2)];
                    a[(i, k + 2)] -= t * r;
                }
                a[(i, k + 1)] -= t * q;
                a[(i, k)] -= t;
            }
        }
    }
    Some(out)
}

/// `8 eps^(1/k)`: the splitting of a Jordan block of size `k` under a
/// backward error `eps ||M||` is at most about `eps^(1/k) ||M||^((k-1)/k) |z|^(1/k)`
/// (nilpotent coupling bounded by `||M||`, perturbation by `eps ||M||`);
/// the factor 8 leaves a tenfold margin over the worst splitting measured on
/// random similarity-transformed Jordan blocks and their tensor powers.
pub fn defect_radius(max_jordan: usize, eps: f64) -> f64 {
    if max_jordan <= 1 {
        return 0.0;
    }
    8.0 * eps.powf(1.0 / max_jordan as f64)
}

/// Clusters under `|z - w| <= max(base, c ||M||^((k-1)/k) max(|z|, |w|)^(1/k))`
/// with `c = defect_radius(k, eps)`.
fn defect_clusters(vals: &[Complex64], norm: f64, max_jordan: usize, eps: f64, base_radius: f64) -> Vec<(Complex64, usize)> {
    let mut pts = vals.to_vec();
    pts.sort_by(cmp_complex);
    let k = max_jordan.max(1) as f64;
    let c = defect_radius(max_jordan, eps) * norm.powf((k - 1.0) / k);
    let radius = |z: f64| base_radius.max(c * z.powf(1.0 / k));
    let reach = radius(norm);
    single_linkage(&pts, reach, |a, b| (a - b).norm() <= radius(a.norm().max(b.norm())))
}

/// Eigenvalues of `m` clustered so that Jordan blocks of size up to
/// `max_jordan` collapse to their centroid; distinct eigenvalues closer than
/// `base_radius` merge as usual. The returned set carries `base_radius`.
pub fn eig_defective(m: &Mat, max_jordan: usize, base_radius: f64) -> Result<SpectrumSet> {
    let (vals, eps) = schur_eigenvalues(m)?;
    let reps = defect_clusters(&vals, crate::linalg::norm2(m), max_jordan, eps, base_radius);
    Ok(SpectrumSet::new(reps.into_iter().map(|(z, _)| z).collect(), base_radius))
}

/// Jordan blocks longer than this are not looked for when estimating
/// multiplicities; the defect radius grows quickly with the block size.
pub const MAX_DETECTED_JORDAN: usize = 4;

/// Largest algebraic multiplicity among the eigenvalue clusters of `m`,
/// detected at the defect radius of a Jordan block of size
/// `min(dim, MAX_DETECTED_JORDAN)`. Upper-bounds the Jordan block sizes of
/// `m` up to that length.
pub fn max_cluster_multiplicity(m: &Mat) -> Result<usize> {
    let n = m.nrows();
    if n == 0 {
        return Ok(0);
    }
    let (vals, eps) = schur_eigenvalues(m)?;
    let clusters = defect_clusters(&vals, crate::linalg::norm2(m), n.min(MAX_DETECTED_JORDAN), eps, DEFAULT_CLUSTER_RADIUS);
    Ok(clusters.iter().map(|&(_, c)| c).max().unwrap_or(0))
}

/// All `n`-fold products (with repetition) of the representatives of `base`.
pub fn product_set(base: &SpectrumSet, n: usize, enum_cap: usize) -> Result<SpectrumSet> {
    if n == 0 {
        return Err(OuError::InvalidArgument("product_set needs n >= 1".into()));
    }
    let reps = base.representatives();
    let count = multichoose(reps.len(), n);
    if count > enum_cap {
        return Err(OuError::EnumCap { requested: count, cap: enum_cap });
    }
    let mut out = Vec::with_capacity(count);
    let mut idx = vec![0usize; n];
    if reps.is_empty() {
        return Ok(SpectrumSet::new(out, base.cluster_radius));
    }
    loop {
        out.push(idx.iter().fold(Complex64::new(1.0, 0.0), |acc, &i| acc * reps[i]));
        // next nondecreasing tuple
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(SpectrumSet::new(out, base.cluster_radius).clustered());
            }
            k -= 1;
            if idx[k] + 1 < reps.len() {
                let v = idx[k] + 1;
                for slot in idx.iter_mut().skip(k) {
                    *slot = v;
                }
                break;
            }
        }
    }
}

/// `C(k + n - 1, n)`, saturating.
fn multichoose(k: usize, n: usize) -> usize {
    if k == 0 {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..n as u128 {
        acc = acc * (k as u128 + i) / (i + 1);
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// Compact window in which lattice spectra are enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeWindow {
    /// Keep points with `Re >= re_min`.
    pub re_min: f64,
    /// Keep points with `|Im| <= im_max`.
    pub im_max: f64,
    /// Cap on the number of terms in a sum.
    pub max_terms: usize,
}

impl LatticeWindow {
    pub const DEFAULT_MAX_TERMS: usize = 64;

    pub fn new(re_min: f64, im_max: f64, max_terms: usize) -> Result<Self> {
        if !(re_min < 0.0) {
            return Err(OuError::InvalidArgument(format!("re_min must be negative, got {re_min}")));
        }
        if !(im_max > 0.0) {
            return Err(OuError::InvalidArgument(format!("im_max must be positive, got {im_max}")));
        }
        Ok(Self { re_min, im_max, max_terms })
    }

    /// Window containing every sum of at most `n` terms.
    pub fn degree(n: usize) -> Self {
        Self { re_min: f64::NEG_INFINITY, im_max: f64::INFINITY, max_terms: n }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.im.abs() <= self.im_max
    }
}

/// All finite sums `sum k_j z_j` (`k_j` in N, including the empty sum 0) of
/// representatives of `eigs` that fall in `window`.
///
/// Every generator has negative real part, so each extra term lowers the real
/// part by at least `min |Re z_j|` and the breadth-first enumeration stops.
pub fn lattice_spectrum(eigs: &SpectrumSet, window: &LatticeWindow, enum_cap: usize) -> Result<SpectrumSet> {
    let gens = eigs.representatives();
    if let Some(bad) = gens.iter().find(|z| !(z.re < 0.0)) {
        return Err(OuError::NonStableInput(format!("{bad}")));
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut out = vec![zero];
    // (partial sum, smallest generator index still allowed)
    let mut frontier: Vec<(Complex64, usize)> = vec![(zero, 0)];
    let mut generated = 1usize;
    for _ in 0..window.max_terms {
        let mut next = Vec::new();
        for &(s, start) in &frontier {
            for (j, &z) in gens.iter().enumerate().skip(start) {
                let v = s + z;
                if v.re < window.re_min {
                    continue;
                }
                generated += 1;
                if generated > enum_cap {
                    return Err(OuError::EnumCap { requested: generated, cap: enum_cap });
                }
                if window.contains(v) {
                    out.push(v);
                }
                next.push((v, j));
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(SpectrumSet::new(out, eigs.cluster_radius).clustered())
}

fn directed(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .map(|&x| b.iter().map(|&y| (x - y).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Hausdorff distance between the representative sets.
pub fn hausdorff(a: &SpectrumSet, b: &SpectrumSet) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(OuError::EmptySet);
    }
    let (ra, rb) = (a.representatives(), b.representatives());
    Ok(directed(&ra, &rb).max(directed(&rb, &ra)))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatchEntry {
    pub computed: Point,
    pub nearest_predicted: Option<Point>,
    pub distance: f64,
}

/// Point-by-point comparison of a computed spectrum against a prediction.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatchReport {
    pub entries: Vec<MatchEntry>,
    /// `None` when exactly one side is empty.
    pub hausdorff: Option<f64>,
    pub tol: f64,
    pub pass: bool,
    pub unmatched_computed: Vec<Point>,
    pub unmatched_predicted: Vec<Point>,
}

pub fn match_report(computed: &SpectrumSet, predicted: &SpectrumSet, tol: f64) -> MatchReport {
    let rc = computed.representatives();
    let rp = predicted.representatives();
    let nearest = |z: Complex64, pool: &[Complex64]| -> Option<(Complex64, f64)> {
        pool.iter().map(|&w| (w, (w - z).norm())).min_by(|a, b| a.1.total_cmp(&b.1))
    };
    let entries: Vec<MatchEntry> = rc
        .iter()
        .map(|&z| match nearest(z, &rp) {
            Some((w, d)) => MatchEntry { computed: z.into(), nearest_predicted: Some(w.into()), distance: d },
            None => MatchEntry { computed: z.into(), nearest_predicted: None, distance: f64::INFINITY },
        })
        .collect();
    let unmatched_computed: Vec<Point> =
        entries.iter().filter(|e| !(e.distance <= tol)).map(|e| e.computed).collect();
    let unmatched_predicted: Vec<Point> = rp
        .iter()
        .filter(|&&w| nearest(w, &rc).map_or(true, |(_, d)| !(d <= tol)))
        .map(|&w| w.into())
        .collect();
    let h = match (rc.is_empty(), rp.is_empty()) {
        (true, true) => Some(0.0),
        (false, false) => Some(directed(&rc, &rp).max(directed(&rp, &rc))),
        _ => None,
    };
    let pass = h.is_some_and(|h| h <= tol);
    MatchReport { entries, hausdorff: h, tol, pass, unmatched_computed, unmatched_predicted }
}
