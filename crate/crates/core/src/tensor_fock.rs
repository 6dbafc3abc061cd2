//! Symmetric tensor algebra over `R^d`: occupation-number bases, tensor and
//! symmetric tensor powers of matrices, creation/annihilation operators,
//! truncated second quantization and the generator lift `dGamma`.
//!
//! The orthonormal basis of the `n`-th symmetric power is indexed by
//! multi-indices `alpha` with `|alpha| = n`:
//!
//! ```text
//! e_alpha = sqrt(alpha! / n!) * sum_{words w with content alpha} f_{w_1} (x) ... (x) f_{w_n}
//! ```
//!
//! so that `a^dagger(f_i) e_alpha = sqrt(alpha_i + 1) e_{alpha + delta_i}`.
//! The isometry `J_n` sending `e_alpha` to the right hand side is what
//! compresses Kronecker-space operators to the symmetric subspace.

use std::collections::HashMap;

use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{OuError, Result};
use crate::linalg::{self, Mat};
use crate::spectra::{self, SpectrumSet};

/// Exponent vector `alpha` of a monomial / occupation state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&a| a as usize).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `alpha! = prod alpha_i!`
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&a| factorial(a as usize)).product()
    }

    /// `alpha + delta_i`
    pub fn raised(&self, i: usize) -> Self {
        let mut e = self.0.clone();
        e[i] += 1;
        Self(e)
    }

    /// `alpha - delta_i`, `None` if `alpha_i = 0`.
    pub fn lowered(&self, i: usize) -> Option<Self> {
        let mut e = self.0.clone();
        e[i] = e[i].checked_sub(1)?;
        Some(Self(e))
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `C(n, k)` as an integer, saturating at `usize::MAX`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// All multi-indices of length `d` and degree `n`, graded-lexicographic
/// (first exponent largest first).
pub fn multi_indices(d: usize, n: usize) -> Vec<MultiIndex> {
    fn rec(d: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if prefix.len() + 1 == d {
            prefix.push(left);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for a in (0..=left).rev() {
            prefix.push(a);
            rec(d, left - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if d == 0 {
        if n == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return out;
    }
    rec(d, n as u32, &mut Vec::with_capacity(d), &mut out);
    out
}

/// Ordered occupation basis of the `n`-th symmetric power of `R^d`.
#[derive(Debug, Clone)]
pub struct SymBasis {
    d: usize,
    n: usize,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
}

impl SymBasis {
    pub fn new(d: usize, n: usize) -> Self {
        let indices = multi_indices(d, n);
        let lookup = indices.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        Self { d, n, indices, lookup }
    }

    /// Fails with `SizeCap` when `C(d + n - 1, n)` exceeds `cap`.
    pub fn with_cap(d: usize, n: usize, cap: usize) -> Result<Self> {
        let dim = sym_dim(d, n);
        if dim > cap {
            return Err(OuError::SizeCap { requested: dim, cap });
        }
        Ok(Self::new(d, n))
    }

    pub fn ambient_dim(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.lookup.get(alpha).copied()
    }
}

/// `C(d + n - 1, n)`
pub fn sym_dim(d: usize, n: usize) -> usize {
    if d == 0 {
        return usize::from(n == 0);
    }
    binomial(d + n - 1, n)
}

fn checked_pow(d: usize, n: usize) -> Option<usize> {
    (0..n).try_fold(1usize, |acc, _| acc.checked_mul(d))
}

fn kron_side(d: usize, n: usize, cap: usize) -> Result<usize> {
    match checked_pow(d, n) {
        Some(s) if s <= cap => Ok(s),
        Some(s) => Err(OuError::SizeCap { requested: s, cap }),
        None => Err(OuError::SizeCap { requested: usize::MAX, cap }),
    }
}

fn check_square(t: &Mat) -> Result<usize> {
    if t.nrows() != t.ncols() {
        return Err(OuError::DimensionMismatch(format!("expected a square matrix, got {}x{}", t.nrows(), t.ncols())));
    }
    Ok(t.nrows())
}

/// `n`-fold Kronecker power `T (x) ... (x) T`.
pub fn tensor_power(t: &Mat, n: usize, cap: usize) -> Result<Mat> {
    let d = check_square(t)?;
    if n == 0 {
        return Err(OuError::InvalidArgument("tensor_power needs n >= 1".into()));
    }
    kron_side(d, n, cap)?;
    let mut out = t.clone();
    for _ in 1..n {
        out = out.kronecker(t);
    }
    Ok(out)
}

/// Sparse description of `J_n`: every Kronecker word belongs to exactly one
/// symmetric basis vector, with weight `sqrt(alpha! / n!)`.
struct Embedding {
    d: usize,
    n: usize,
    /// per Kronecker index: (symmetric basis position, weight)
    word: Vec<(usize, f64)>,
    /// per symmetric basis position: Kronecker indices of its words
    members: Vec<Vec<usize>>,
}

impl Embedding {
    fn new(basis: &SymBasis, side: usize) -> Self {
        let (d, n) = (basis.d, basis.n);
        let weights: Vec<f64> =
            basis.indices.iter().map(|a| (a.factorial() / factorial(n)).sqrt()).collect();
        let mut word = Vec::with_capacity(side);
        let mut members = vec![Vec::new(); basis.dim()];
        let mut content = vec![0u32; d];
        for idx in 0..side {
            content.iter_mut().for_each(|c| *c = 0);
            let mut rest = idx;
            for _ in 0..n {
                content[rest % d] += 1;
                rest /= d;
            }
            let pos = basis.lookup[&MultiIndex(content.clone())];
            word.push((pos, weights[pos]));
            members[pos].push(idx);
        }
        Self { d, n, word, members }
    }

    fn column(&self, pos: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.word.len()];
        for &w in &self.members[pos] {
            v[w] = self.word[w].1;
        }
        v
    }

    /// `J_n^T v`
    fn project(&self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for (w, &(pos, weight)) in self.word.iter().enumerate() {
            out[pos] += weight * v[w];
        }
    }

    /// Applies `m` on tensor slot `k` (slot 0 is the most significant digit).
    fn apply_mode(&self, m: &Mat, k: usize, v: &[f64]) -> Vec<f64> {
        let d = self.d;
        let stride = d.pow((self.n - 1 - k) as u32);
        let mut out = vec![0.0; v.len()];
        for (idx, o) in out.iter_mut().enumerate() {
            let digit = (idx / stride) % d;
            let base = idx - digit * stride;
            *o = (0..d).map(|u| m[(digit, u)] * v[base + u * stride]).sum();
        }
        out
    }
}

/// Dense `J_n` (Kronecker dimension `d^n` by `C(d + n - 1, n)`).
pub fn symmetric_embedding(d: usize, n: usize, cap: usize) -> Result<Mat> {
    let side = kron_side(d, n, cap)?;
    let basis = SymBasis::with_cap(d, n, cap)?;
    let emb = Embedding::new(&basis, side);
    let mut j = Mat::zeros(side, basis.dim());
    for (w, &(pos, weight)) in emb.word.iter().enumerate() {
        j[(w, pos)] = weight;
    }
    Ok(j)
}

/// Kronecker intermediates are bounded separately from the output cap.
const KRON_WORK_CAP: usize = 1 << 22;

fn compress(m: &Mat, n: usize, cap: usize, lift: impl Fn(&Embedding, &[f64]) -> Vec<f64>) -> Result<Mat> {
    let d = check_square(m)?;
    let basis = SymBasis::with_cap(d, n, cap)?;
    let side = kron_side(d, n, KRON_WORK_CAP)?;
    let emb = Embedding::new(&basis, side);
    let dim = basis.dim();
    let mut out = Mat::zeros(dim, dim);
    let mut col = vec![0.0; dim];
    for pos in 0..dim {
        let v = lift(&emb, &emb.column(pos));
        emb.project(&v, &mut col);
        out.set_column(pos, &nalgebra::DVector::from_column_slice(&col));
    }
    Ok(out)
}

/// Matrix of `T^(sym n)` in the occupation basis, `J_n^T T^(x)n J_n`.
pub fn sym_power(t: &Mat, n: usize, cap: usize) -> Result<Mat> {
    if n == 0 {
        check_square(t)?;
        return Ok(Mat::identity(1, 1));
    }
    compress(t, n, cap, |emb, v| {
        (0..n).fold(v.to_vec(), |acc, k| emb.apply_mode(t, k, &acc))
    })
}

/// `dGamma_n(M) = sum_j I (x) ... (x) M (x) ... (x) I` compressed to the
/// symmetric subspace: the generator of `s -> (e^{sM})^(sym n)`.
pub fn dgamma(m: &Mat, n: usize, cap: usize) -> Result<Mat> {
    if n == 0 {
        check_square(m)?;
        return Ok(Mat::zeros(1, 1));
    }
    compress(m, n, cap, |emb, v| {
        let mut acc = vec![0.0; v.len()];
        for k in 0..n {
            for (a, b) in acc.iter_mut().zip(emb.apply_mode(m, k, v)) {
                *a += b;
            }
        }
        acc
    })
}

/// `a_n^dagger(h)`: `SymBasis(d, n) -> SymBasis(d, n + 1)`,
/// `e_alpha -> sum_i h_i sqrt(alpha_i + 1) e_{alpha + delta_i}`.
pub fn creation(h: &[f64], n: usize, cap: usize) -> Result<Mat> {
    let d = h.len();
    let from = SymBasis::with_cap(d, n, cap)?;
    let to = SymBasis::with_cap(d, n + 1, cap)?;
    let mut out = Mat::zeros(to.dim(), from.dim());
    for (col, alpha) in from.indices().iter().enumerate() {
        for (i, &hi) in h.iter().enumerate() {
            let row = to.lookup[&alpha.raised(i)];
            out[(row, col)] += hi * f64::from(alpha.exponents()[i] + 1).sqrt();
        }
    }
    Ok(out)
}

/// `a_n(h)`: `SymBasis(d, n) -> SymBasis(d, n - 1)`, the transpose of
/// `a_{n-1}^dagger(h)`. Over real scalars the conjugation is trivial.
pub fn annihilation(h: &[f64], n: usize, cap: usize) -> Result<Mat> {
    if n == 0 {
        return Err(OuError::InvalidArgument("annihilation needs n >= 1".into()));
    }
    Ok(creation(h, n - 1, cap)?.transpose())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FockKind {
    /// Blocks are `T^(sym n)` on the symmetric powers.
    Symmetric,
    /// Blocks are the full Kronecker powers `T^(x)n`.
    Full,
}

/// `Gamma(T)` truncated to levels `0..=N`.
#[derive(Debug, Clone)]
pub struct FockTruncation {
    pub kind: FockKind,
    pub level: usize,
    pub blocks: Vec<Mat>,
    pub offsets: Vec<usize>,
    /// Largest eigenvalue cluster multiplicity of `T`; bounds Jordan sizes.
    pub multiplicity: usize,
}

impl FockTruncation {
    fn from_blocks(kind: FockKind, blocks: Vec<Mat>, multiplicity: usize) -> Self {
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut acc = 0;
        for b in &blocks {
            offsets.push(acc);
            acc += b.nrows();
        }
        Self { kind, level: blocks.len() - 1, blocks, offsets, multiplicity }
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(Mat::nrows).sum()
    }

    /// Block-diagonal matrix of the truncation.
    pub fn to_dense(&self) -> Mat {
        let n = self.dim();
        let mut out = Mat::zeros(n, n);
        for (b, &off) in self.blocks.iter().zip(&self.offsets) {
            out.view_mut((off, off), (b.nrows(), b.ncols())).copy_from(b);
        }
        out
    }

    /// Spectrum of the truncation seen inside the levels `0..=ambient_level`
    /// (levels above `self.level` act as zero). Each block is resolved with a
    /// cluster radius wide enough for the Jordan blocks it can carry.
    pub fn spectrum_in(&self, ambient_level: usize, cluster_radius: f64) -> Result<SpectrumSet> {
        let mut pts = Vec::new();
        for (n, b) in self.blocks.iter().enumerate() {
            let jordan = n * self.multiplicity.saturating_sub(1) + 1;
            pts.extend_from_slice(spectra::eig_defective(b, jordan, cluster_radius)?.points());
        }
        if ambient_level > self.level {
            pts.push(num_complex::Complex64::new(0.0, 0.0));
        }
        Ok(SpectrumSet::new(pts, cluster_radius).clustered())
    }

    pub fn spectrum(&self, cluster_radius: f64) -> Result<SpectrumSet> {
        self.spectrum_in(self.level, cluster_radius)
    }
}

fn check_contraction(t: &Mat, allow_noncontraction: bool, tol: &Tolerances) -> Result<()> {
    let norm = linalg::norm2(t);
    if !allow_noncontraction && norm > 1.0 + tol.contraction_tol {
        return Err(OuError::NotContraction(norm));
    }
    Ok(())
}

/// `Gamma^sym(T) = T^(sym 0) + ... + T^(sym N)`.
pub fn second_quantization(t: &Mat, level: usize, allow_noncontraction: bool, tol: &Tolerances) -> Result<FockTruncation> {
    check_square(t)?;
    check_contraction(t, allow_noncontraction, tol)?;
    let blocks = (0..=level).map(|n| sym_power(t, n, tol.size_cap)).collect::<Result<Vec<_>>>()?;
    Ok(FockTruncation::from_blocks(FockKind::Symmetric, blocks, spectra::max_cluster_multiplicity(t)?))
}

/// `Gamma(T) = T^(x)0 + ... + T^(x)N` on the full (non-symmetric) Fock space.
pub fn full_second_quantization(t: &Mat, level: usize, allow_noncontraction: bool, tol: &Tolerances) -> Result<FockTruncation> {
    check_square(t)?;
    check_contraction(t, allow_noncontraction, tol)?;
    let mut blocks = vec![Mat::identity(1, 1)];
    for n in 1..=level {
        blocks.push(tensor_power(t, n, tol.size_cap)?);
    }
    Ok(FockTruncation::from_blocks(FockKind::Full, blocks, spectra::max_cluster_multiplicity(t)?))
}

/// `{1} + {products of n eigenvalues of T : 1 <= n <= N}`.
pub fn predicted_fock_spectrum(t: &Mat, level: usize, tol: &Tolerances) -> Result<SpectrumSet> {
    let base = spectra::eig_defective(t, spectra::max_cluster_multiplicity(t)?, tol.cluster_radius)?;
    let mut out = SpectrumSet::from_real(&[1.0], tol.cluster_radius);
    for n in 1..=level {
        out = out.union(&spectra::product_set(&base, n, tol.enum_cap)?);
    }
    Ok(out.clustered())
}
