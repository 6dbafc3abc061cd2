//! Polynomials on `R^d` of bounded total degree, in monomial coordinates.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;

use nalgebra::DVector;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{OuError, Result};
use crate::linalg::Mat;
use crate::tensor_fock::{multi_indices, MultiIndex};

/// Monomials `x^alpha`, `|alpha| <= N`, degree-major and graded-lexicographic
/// inside each degree.
#[derive(Debug, Clone)]
pub struct PolyBasis {
    d: usize,
    degree: usize,
    monomials: Vec<MultiIndex>,
    starts: Vec<usize>,
    lookup: HashMap<MultiIndex, usize>,
}

impl PolyBasis {
    pub fn new(d: usize, degree: usize) -> Self {
        let mut monomials = Vec::new();
        let mut starts = Vec::with_capacity(degree + 2);
        for n in 0..=degree {
            starts.push(monomials.len());
            monomials.extend(multi_indices(d, n));
        }
        starts.push(monomials.len());
        let lookup = monomials.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        Self { d, degree, monomials, starts, lookup }
    }

    /// Fails with `SizeCap` when `C(d + N, N)` exceeds `cap`.
    pub fn with_cap(d: usize, degree: usize, cap: usize) -> Result<Self> {
        let dim = crate::tensor_fock::binomial(d + degree, degree);
        if dim > cap {
            return Err(OuError::SizeCap { requested: dim, cap });
        }
        Ok(Self::new(d, degree))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    pub fn monomials(&self) -> &[MultiIndex] {
        &self.monomials
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.lookup.get(alpha).copied()
    }

    /// Positions of the monomials of total degree exactly `n`.
    pub fn degree_range(&self, n: usize) -> Range<usize> {
        self.starts[n]..self.starts[n + 1]
    }

    /// Positions of all monomials of total degree at most `n`.
    pub fn up_to(&self, n: usize) -> Range<usize> {
        0..self.starts[n + 1]
    }

    pub fn degree_of(&self, pos: usize) -> usize {
        self.monomials[pos].degree()
    }

    /// Coefficients of a sparse polynomial, failing if a term is out of range.
    pub fn coefficients(&self, p: &SparsePoly) -> Result<DVector<f64>> {
        let mut out = DVector::zeros(self.dim());
        for (e, &c) in &p.terms {
            let pos = self.position(&MultiIndex::new(e.clone())).ok_or_else(|| {
                OuError::DimensionMismatch(format!("monomial {e:?} is outside the degree-{} basis in {} variables", self.degree, self.d))
            })?;
            out[pos] += c;
        }
        Ok(out)
    }
}

/// An element of the span of a [`PolyBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub d: usize,
    pub degree: usize,
    pub coeffs: DVector<f64>,
}

impl Polynomial {
    pub fn zero(basis: &PolyBasis) -> Self {
        Self { d: basis.d, degree: basis.degree, coeffs: DVector::zeros(basis.dim()) }
    }

    pub fn monomial(basis: &PolyBasis, alpha: &MultiIndex) -> Result<Self> {
        let mut p = Self::zero(basis);
        let pos = basis
            .position(alpha)
            .ok_or_else(|| OuError::DimensionMismatch(format!("monomial {alpha} not in basis")))?;
        p.coeffs[pos] = 1.0;
        Ok(p)
    }

    pub fn from_coeffs(basis: &PolyBasis, coeffs: DVector<f64>) -> Result<Self> {
        if coeffs.len() != basis.dim() {
            return Err(OuError::DimensionMismatch(format!("{} coefficients for a basis of size {}", coeffs.len(), basis.dim())));
        }
        Ok(Self { d: basis.d, degree: basis.degree, coeffs })
    }

    pub fn check_basis(&self, basis: &PolyBasis) -> Result<()> {
        if self.d != basis.d || self.degree != basis.degree || self.coeffs.len() != basis.dim() {
            return Err(OuError::DimensionMismatch("polynomial does not live on this basis".into()));
        }
        Ok(())
    }

    /// Evaluates at a point.
    pub fn eval(&self, basis: &PolyBasis, x: &[f64]) -> f64 {
        basis
            .monomials()
            .iter()
            .zip(self.coeffs.iter())
            .map(|(a, &c)| c * a.exponents().iter().zip(x).map(|(&e, &xi)| xi.powi(e as i32)).product::<f64>())
            .sum()
    }

    fn terms(&self) -> BTreeMap<String, f64> {
        let basis = PolyBasis::new(self.d, self.degree);
        basis
            .monomials()
            .iter()
            .zip(self.coeffs.iter())
            .filter(|(_, &c)| c != 0.0)
            .map(|(a, &c)| (a.to_string(), c))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct PolynomialRepr {
    d: usize,
    degree: usize,
    terms: BTreeMap<String, f64>,
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolynomialRepr { d: self.d, degree: self.degree, terms: self.terms() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let repr = PolynomialRepr::deserialize(de)?;
        let basis = PolyBasis::new(repr.d, repr.degree);
        let mut coeffs = DVector::zeros(basis.dim());
        for (key, c) in repr.terms {
            let exps = if key.is_empty() {
                Vec::new()
            } else {
                key.split(',').map(|s| s.trim().parse::<u32>()).collect::<std::result::Result<Vec<_>, _>>().map_err(D::Error::custom)?
            };
            let pos = basis
                .position(&MultiIndex::new(exps))
                .ok_or_else(|| D::Error::custom(format!("term {key:?} outside the basis")))?;
            coeffs[pos] += c;
        }
        Ok(Self { d: repr.d, degree: repr.degree, coeffs })
    }
}

/// Sparse polynomial used for symbolic expansions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparsePoly {
    pub vars: usize,
    pub terms: HashMap<Vec<u32>, f64>,
}

impl SparsePoly {
    pub fn constant(vars: usize, c: f64) -> Self {
        let mut terms = HashMap::new();
        terms.insert(vec![0; vars], c);
        Self { vars, terms }
    }

    /// `sum_k coeffs[k] x_k`
    pub fn linear(coeffs: &[f64]) -> Self {
        let vars = coeffs.len();
        let mut terms = HashMap::new();
        for (k, &c) in coeffs.iter().enumerate() {
            if c != 0.0 {
                let mut e = vec![0; vars];
                e[k] = 1;
                terms.insert(e, c);
            }
        }
        Self { vars, terms }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms: HashMap<Vec<u32>, f64> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *terms.entry(e).or_insert(0.0) += ca * cb;
            }
        }
        Self { vars: self.vars, terms }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::constant(self.vars, 1.0), |acc, _| acc.mul(self))
    }

    /// `prod_i forms[i]^alpha_i`
    pub fn product_of_powers(forms: &[SparsePoly], alpha: &[u32], vars: usize) -> Self {
        forms.iter().zip(alpha).fold(Self::constant(vars, 1.0), |acc, (f, &a)| if a == 0 { acc } else { acc.mul(&f.pow(a)) })
    }
}

/// Linear forms `x -> (M x)_i`, one per row of `m`.
pub fn row_forms(m: &Mat) -> Vec<SparsePoly> {
    (0..m.nrows()).map(|i| SparsePoly::linear(&m.row(i).iter().copied().collect::<Vec<_>>())).collect()
}
