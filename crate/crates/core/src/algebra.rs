//! Finite-dimensional C*-algebras as direct sums of full complex matrix blocks.
//!
//! Every finite-dimensional C*-algebra is isomorphic to `M_{d1} ⊕ … ⊕ M_{dm}`, so an
//! [`AlgebraShape`] is just the list of block sizes and an [`AlgebraElement`] is one
//! square complex matrix per block. Norm, positivity and invertibility all reduce to
//! per-block eigen- or singular-value problems.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, ONE, ZERO};

/// Block sizes `(d1, …, dm)` of the algebra `M_{d1} ⊕ … ⊕ M_{dm}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct AlgebraShape {
    block_dims: Vec<usize>,
}

impl AlgebraShape {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() {
            return Err(Error::InvalidShape("at least one block is required".into()));
        }
        if let Some(pos) = block_dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidShape(format!("block {pos} has dimension 0")));
        }
        Ok(Self { block_dims })
    }

    /// The one-dimensional algebra ℂ.
    pub fn complex_field() -> Self {
        Self {
            block_dims: vec![1],
        }
    }

    /// A single full matrix block `M_d`.
    pub fn matrix(d: usize) -> Result<Self> {
        Self::new(vec![d])
    }

    /// The abelian algebra `ℂ^m` (m one-dimensional blocks).
    pub fn diagonal(m: usize) -> Result<Self> {
        Self::new(vec![1; m])
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn num_blocks(&self) -> usize {
        self.block_dims.len()
    }

    pub fn is_abelian(&self) -> bool {
        self.block_dims.iter().all(|&d| d == 1)
    }

    /// True for the shape `(1)`, the only algebra isomorphic to ℂ.
    pub fn is_complex_field(&self) -> bool {
        self.block_dims == [1]
    }

    /// Complex dimension `Σ d_i²`.
    pub fn complex_dim(&self) -> usize {
        self.block_dims.iter().map(|d| d * d).sum()
    }

    /// Real dimension `2 Σ d_i²`.
    pub fn real_dim(&self) -> usize {
        2 * self.complex_dim()
    }

    pub fn check_same(&self, other: &AlgebraShape) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected: self.block_dims.clone(),
                found: other.block_dims.clone(),
            })
        }
    }
}

impl TryFrom<Vec<usize>> for AlgebraShape {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<AlgebraShape> for Vec<usize> {
    fn from(s: AlgebraShape) -> Self {
        s.block_dims
    }
}

impl std::fmt::Display for AlgebraShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.block_dims.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// An element of a block-diagonal algebra: one `d_i × d_i` complex matrix per block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementRepr", into = "ElementRepr")]
pub struct AlgebraElement {
    shape: AlgebraShape,
    blocks: Vec<CMatrix>,
}

impl AlgebraElement {
    pub fn from_blocks(shape: AlgebraShape, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != shape.num_blocks() {
            return Err(Error::DimensionMismatch(format!(
                "shape {shape} has {} blocks but {} matrices were given",
                shape.num_blocks(),
                blocks.len()
            )));
        }
        for (i, (b, &d)) in blocks.iter().zip(shape.block_dims()).enumerate() {
            if b.nrows() != d || b.ncols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "block {i} is {}x{}, expected {d}x{d}",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(Self { shape, blocks })
    }

    pub fn zeros(shape: &AlgebraShape) -> Self {
        let blocks = shape
            .block_dims()
            .iter()
            .map(|&d| CMatrix::zeros(d, d))
            .collect();
        Self {
            shape: shape.clone(),
            blocks,
        }
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        Self::scalar(shape, ONE)
    }

    /// `z · 1`.
    pub fn scalar(shape: &AlgebraShape, z: Complex64) -> Self {
        let blocks = shape
            .block_dims()
            .iter()
            .map(|&d| CMatrix::identity(d, d) * z)
            .collect();
        Self {
            shape: shape.clone(),
            blocks,
        }
    }

    /// Element of an abelian algebra from its coordinates.
    pub fn from_diagonal_values(values: &[Complex64]) -> Self {
        let shape = AlgebraShape::diagonal(values.len()).expect("non-empty coordinates");
        let blocks = values
            .iter()
            .map(|&v| CMatrix::from_element(1, 1, v))
            .collect();
        Self { shape, blocks }
    }

    /// Single-block element from a dense matrix.
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch(
                "matrix block must be square".into(),
            ));
        }
        let shape = AlgebraShape::matrix(m.nrows())?;
        Ok(Self {
            shape,
            blocks: vec![m],
        })
    }

    /// Element with independent standard complex normal entries.
    pub fn random<R: Rng + ?Sized>(shape: &AlgebraShape, rng: &mut R) -> Self {
        let blocks = shape
            .block_dims()
            .iter()
            .map(|&d| linalg::random_matrix(d, d, rng))
            .collect();
        Self {
            shape: shape.clone(),
            blocks,
        }
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CMatrix {
        &self.blocks[i]
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Result<Self> {
        self.shape.check_same(&other.shape)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(Self {
            shape: self.shape.clone(),
            blocks,
        })
    }

    /// Blockwise product; shapes must agree.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(|b| b * z).collect(),
        }
    }

    pub fn scale_real(&self, t: f64) -> Self {
        self.scale(Complex64::new(t, 0.0))
    }

    /// C*-norm: the largest singular value over all blocks.
    pub fn norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(linalg::operator_norm)
            .fold(0.0, f64::max)
    }

    /// Euclidean norm of the coordinate vector (Frobenius over blocks).
    pub fn frobenius_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.norm_squared())
            .sum::<f64>()
            .sqrt()
    }

    pub fn hermitian_part(&self) -> Self {
        Self {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(linalg::hermitian_part).collect(),
        }
    }

    /// Largest `‖b - b*‖_F` over blocks.
    pub fn skew_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(linalg::skew_defect)
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the Hermitian part, over all blocks.
    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .map(linalg::min_hermitian_eigenvalue)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest eigenvalue of the Hermitian part, over all blocks.
    pub fn max_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .map(linalg::max_hermitian_eigenvalue)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Hermitian within `tol` and every eigenvalue `≥ -tol`, both relative to `max(1, ‖a‖)`.
    ///
    /// Asymmetry is reported as non-positivity rather than symmetrized away.
    pub fn is_positive(&self, tol: f64) -> bool {
        self.positivity_defect(tol).is_none()
    }

    /// First block violating positivity, with its offending eigenvalue.
    fn positivity_defect(&self, tol: f64) -> Option<(usize, f64)> {
        let scale = self.norm().max(1.0);
        for (i, b) in self.blocks.iter().enumerate() {
            if linalg::skew_defect(b) > tol * scale {
                return Some((i, f64::NAN));
            }
            let lo = linalg::min_hermitian_eigenvalue(b);
            if lo < -tol * scale {
                return Some((i, lo));
            }
        }
        None
    }

    /// The unique positive square root; fails on elements that are not positive within `tol`.
    pub fn sqrt_positive(&self, tol: f64) -> Result<Self> {
        if let Some((block, min_eigenvalue)) = self.positivity_defect(tol) {
            return Err(Error::NotPositive {
                block,
                min_eigenvalue,
            });
        }
        Ok(self.sqrt_clamped())
    }

    /// Square root of the Hermitian part; eigenvalues at rounding level or below count as zero.
    pub fn sqrt_clamped(&self) -> Self {
        Self {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(linalg::psd_sqrt).collect(),
        }
    }

    /// `(block index, smallest singular value)` of the worst-conditioned block.
    pub fn min_singular_value(&self) -> (usize, f64) {
        self.blocks
            .iter()
            .map(linalg::min_singular_value)
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |acc, (i, s)| if s < acc.1 { (i, s) } else { acc },
            )
    }

    /// Membership in the group of invertibles: every block's smallest singular value
    /// must exceed `sing_tol · ‖a‖`.
    pub fn is_invertible(&self, sing_tol: f64) -> bool {
        let threshold = sing_tol * self.norm();
        self.min_singular_value().1 > threshold
    }

    /// Blockwise inverse, or [`Error::NotInvertible`] naming the offending block.
    pub fn try_inverse(&self, sing_tol: f64) -> Result<Self> {
        let threshold = sing_tol * self.norm();
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for (i, b) in self.blocks.iter().enumerate() {
            let s = linalg::min_singular_value(b);
            if s <= threshold || s == 0.0 {
                return Err(Error::NotInvertible {
                    block: i,
                    min_singular: s,
                });
            }
            let inv = b.clone().try_inverse().ok_or(Error::NotInvertible {
                block: i,
                min_singular: s,
            })?;
            blocks.push(inv);
        }
        Ok(Self {
            shape: self.shape.clone(),
            blocks,
        })
    }

    /// Moore–Penrose pseudo-inverse of each block.
    pub fn pseudo_inverse(&self, eps: f64) -> Self {
        Self {
            shape: self.shape.clone(),
            blocks: self
                .blocks
                .iter()
                .map(|b| {
                    let cutoff = eps * linalg::operator_norm(b).max(f64::MIN_POSITIVE);
                    b.clone()
                        .pseudo_inverse(cutoff)
                        .unwrap_or_else(|_| CMatrix::zeros(b.nrows(), b.ncols()))
                })
                .collect(),
        }
    }

    /// `‖a - b‖ ≤ tol · (1 + max(‖a‖, ‖b‖))`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.shape != other.shape {
            return false;
        }
        let diff = self.try_sub(other).expect("same shape").norm();
        diff <= tol * (1.0 + self.norm().max(other.norm()))
    }

    /// Real coordinates, block by block, row-major, `re` then `im`.
    pub fn to_real_coords(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.shape.real_dim());
        for b in &self.blocks {
            for r in 0..b.nrows() {
                for c in 0..b.ncols() {
                    out.push(b[(r, c)].re);
                    out.push(b[(r, c)].im);
                }
            }
        }
        out
    }

    pub fn from_real_coords(shape: &AlgebraShape, coords: &[f64]) -> Result<Self> {
        if coords.len() != shape.real_dim() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} real coordinates, got {}",
                shape.real_dim(),
                coords.len()
            )));
        }
        let mut it = coords.chunks_exact(2);
        let blocks = shape
            .block_dims()
            .iter()
            .map(|&d| {
                let mut m = CMatrix::zeros(d, d);
                for r in 0..d {
                    for c in 0..d {
                        let p = it.next().expect("length checked");
                        m[(r, c)] = Complex64::new(p[0], p[1]);
                    }
                }
                m
            })
            .collect();
        Ok(Self {
            shape: shape.clone(),
            blocks,
        })
    }

    /// Complex coordinates, block by block, row-major.
    pub fn to_complex_coords(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.shape.complex_dim());
        for b in &self.blocks {
            for r in 0..b.nrows() {
                for c in 0..b.ncols() {
                    out.push(b[(r, c)]);
                }
            }
        }
        out
    }

    pub fn from_complex_coords(shape: &AlgebraShape, coords: &[Complex64]) -> Result<Self> {
        if coords.len() != shape.complex_dim() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} complex coordinates, got {}",
                shape.complex_dim(),
                coords.len()
            )));
        }
        let mut offset = 0;
        let blocks = shape
            .block_dims()
            .iter()
            .map(|&d| {
                let m = CMatrix::from_row_slice(d, d, &coords[offset..offset + d * d]);
                offset += d * d;
                m
            })
            .collect();
        Ok(Self {
            shape: shape.clone(),
            blocks,
        })
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.try_add(rhs)
            .expect("algebra elements of different shapes")
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.try_sub(rhs)
            .expect("algebra elements of different shapes")
    }
}

impl Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.try_mul(rhs)
            .expect("algebra elements of different shapes")
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.scale_real(-1.0)
    }
}

/// JSON form of a complex matrix: rows of `[re, im]` pairs.
pub(crate) type MatrixRepr = Vec<Vec<[f64; 2]>>;

pub(crate) fn matrix_to_repr(m: &CMatrix) -> MatrixRepr {
    (0..m.nrows())
        .map(|r| {
            (0..m.ncols())
                .map(|c| [m[(r, c)].re, m[(r, c)].im])
                .collect()
        })
        .collect()
}

pub(crate) fn matrix_from_repr(rows: &MatrixRepr) -> Result<CMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::DimensionMismatch("ragged matrix rows".into()));
    }
    Ok(CMatrix::from_fn(n, m, |r, c| {
        Complex64::new(rows[r][c][0], rows[r][c][1])
    }))
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    shape: AlgebraShape,
    blocks: Vec<MatrixRepr>,
}

impl TryFrom<ElementRepr> for AlgebraElement {
    type Error = Error;
    fn try_from(r: ElementRepr) -> Result<Self> {
        let blocks = r
            .blocks
            .iter()
            .map(matrix_from_repr)
            .collect::<Result<Vec<_>>>()?;
        AlgebraElement::from_blocks(r.shape, blocks)
    }
}

impl From<AlgebraElement> for ElementRepr {
    fn from(a: AlgebraElement) -> Self {
        ElementRepr {
            blocks: a.blocks.iter().map(matrix_to_repr).collect(),
            shape: a.shape,
        }
    }
}

/// A state: `φ(a) = Σ_i w_i · tr(ρ_i a_i)` with density matrices `ρ_i` and convex weights `w_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct State {
    shape: AlgebraShape,
    densities: Vec<CMatrix>,
    weights: Vec<f64>,
}

const STATE_TOL: f64 = 1e-9;

impl State {
    pub fn new(shape: AlgebraShape, densities: Vec<CMatrix>, weights: Vec<f64>) -> Result<Self> {
        if densities.len() != shape.num_blocks() || weights.len() != shape.num_blocks() {
            return Err(Error::InvalidState(
                "one density and one weight per block".into(),
            ));
        }
        for (i, (rho, &d)) in densities.iter().zip(shape.block_dims()).enumerate() {
            if rho.nrows() != d || rho.ncols() != d {
                return Err(Error::InvalidState(format!(
                    "density {i} has the wrong size"
                )));
            }
            let tr = rho.trace();
            if (tr - ONE).norm() > STATE_TOL {
                return Err(Error::InvalidState(format!("density {i} has trace {tr}")));
            }
            if linalg::skew_defect(rho) > STATE_TOL
                || linalg::min_hermitian_eigenvalue(rho) < -STATE_TOL
            {
                return Err(Error::InvalidState(format!(
                    "density {i} is not positive semidefinite"
                )));
            }
        }
        if weights.iter().any(|&w| w.is_nan() || w < -STATE_TOL) {
            return Err(Error::InvalidState("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("weights sum to {total}")));
        }
        Ok(Self {
            shape,
            densities,
            weights,
        })
    }

    /// Vector state `a ↦ ξ* a_block ξ` for a unit vector in one block.
    pub fn pure(shape: &AlgebraShape, block: usize, vector: &CVector) -> Result<Self> {
        let mut parts: Vec<Option<CVector>> = vec![None; shape.num_blocks()];
        if block >= parts.len() {
            return Err(Error::InvalidState(format!("block {block} out of range")));
        }
        parts[block] = Some(vector.clone());
        Self::from_block_vectors(shape, &[(1.0, parts)])
    }

    /// Convex combination `Σ t_j φ_{ξ_j}` of vector states, where each `ξ_j` is given as one
    /// (possibly absent) component per block and is normalized over all blocks jointly.
    pub fn from_block_vectors(
        shape: &AlgebraShape,
        terms: &[(f64, Vec<Option<CVector>>)],
    ) -> Result<Self> {
        let m = shape.num_blocks();
        let mut raw: Vec<CMatrix> = shape
            .block_dims()
            .iter()
            .map(|&d| CMatrix::zeros(d, d))
            .collect();
        for (t, parts) in terms {
            if parts.len() != m {
                return Err(Error::InvalidState("one component per block".into()));
            }
            let total: f64 = parts.iter().flatten().map(|v| v.norm_squared()).sum();
            if total <= 0.0 {
                return Err(Error::InvalidState("zero vector".into()));
            }
            for (b, part) in parts.iter().enumerate() {
                if let Some(v) = part {
                    if v.len() != shape.block_dims()[b] {
                        return Err(Error::InvalidState(format!(
                            "component {b} has the wrong length"
                        )));
                    }
                    raw[b] += (v * v.adjoint()) * Complex64::new(t / total, 0.0);
                }
            }
        }
        let mut weights = Vec::with_capacity(m);
        let mut densities = Vec::with_capacity(m);
        for (rho, &d) in raw.into_iter().zip(shape.block_dims()) {
            let w = rho.trace().re;
            if w > 0.0 {
                densities.push(rho / Complex64::new(w, 0.0));
                weights.push(w);
            } else {
                densities.push(CMatrix::identity(d, d) / Complex64::new(d as f64, 0.0));
                weights.push(0.0);
            }
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        Self::new(shape.clone(), densities, weights)
    }

    /// Tracial state `a ↦ Σ tr(a_i) / Σ d_i`.
    pub fn tracial(shape: &AlgebraShape) -> Self {
        let total: usize = shape.block_dims().iter().sum();
        let densities = shape
            .block_dims()
            .iter()
            .map(|&d| CMatrix::identity(d, d) / Complex64::new(d as f64, 0.0))
            .collect();
        let weights = shape
            .block_dims()
            .iter()
            .map(|&d| d as f64 / total as f64)
            .collect();
        Self {
            shape: shape.clone(),
            densities,
            weights,
        }
    }

    /// Random state: Wishart-style densities and Dirichlet-like weights.
    pub fn random<R: Rng + ?Sized>(shape: &AlgebraShape, rng: &mut R) -> Self {
        let densities = shape
            .block_dims()
            .iter()
            .map(|&d| {
                let g = linalg::random_matrix(d, d, rng);
                let rho = &g * g.adjoint();
                let tr = rho.trace();
                rho / tr
            })
            .collect();
        let mut weights: Vec<f64> = (0..shape.num_blocks())
            .map(|_| rng.random::<f64>() + 1e-3)
            .collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        Self {
            shape: shape.clone(),
            densities,
            weights,
        }
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn densities(&self) -> &[CMatrix] {
        &self.densities
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn apply(&self, a: &AlgebraElement) -> Result<Complex64> {
        self.shape.check_same(a.shape())?;
        Ok(self
            .densities
            .iter()
            .zip(&self.weights)
            .zip(a.blocks())
            .map(|((rho, &w), b)| (rho * b).trace() * w)
            .fold(ZERO, |acc, z| acc + z))
    }
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    shape: AlgebraShape,
    densities: Vec<MatrixRepr>,
    weights: Vec<f64>,
}

impl TryFrom<StateRepr> for State {
    type Error = Error;
    fn try_from(r: StateRepr) -> Result<Self> {
        let densities = r
            .densities
            .iter()
            .map(matrix_from_repr)
            .collect::<Result<Vec<_>>>()?;
        State::new(r.shape, densities, r.weights)
    }
}

impl From<State> for StateRepr {
    fn from(s: State) -> Self {
        StateRepr {
            densities: s.densities.iter().map(matrix_to_repr).collect(),
            weights: s.weights,
            shape: s.shape,
        }
    }
}

/// The multiplicative functionals of an abelian algebra: one coordinate evaluation per block.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacterSet {
    shape: AlgebraShape,
}

impl CharacterSet {
    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.num_blocks()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `χ_i(a)`, the `i`-th coordinate of `a`.
    pub fn evaluate(&self, i: usize, a: &AlgebraElement) -> Result<Complex64> {
        self.shape.check_same(a.shape())?;
        Ok(a.block(i)[(0, 0)])
    }

    pub fn evaluate_all(&self, a: &AlgebraElement) -> Result<Vec<Complex64>> {
        self.shape.check_same(a.shape())?;
        Ok(a.blocks().iter().map(|b| b[(0, 0)]).collect())
    }
}

/// A total set of characters, or `None` when the shape has a block of size ≥ 2.
///
/// A full matrix block admits no multiplicative functional, so no total family exists
/// unless the algebra is abelian.
pub fn characters(shape: &AlgebraShape) -> Option<CharacterSet> {
    shape.is_abelian().then(|| CharacterSet {
        shape: shape.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn m2(entries: [f64; 4]) -> AlgebraElement {
        AlgebraElement::from_matrix(CMatrix::from_row_slice(2, 2, &entries.map(|v| c(v, 0.0))))
            .unwrap()
    }

    fn shape(d: &[usize]) -> AlgebraShape {
        AlgebraShape::new(d.to_vec()).unwrap()
    }

    #[test]
    fn shape_validation() {
        assert!(AlgebraShape::new(vec![]).is_err());
        assert!(AlgebraShape::new(vec![2, 0]).is_err());
        assert!(shape(&[1, 1, 1]).is_abelian());
        assert!(!shape(&[1, 2]).is_abelian());
        assert_eq!(shape(&[2, 3]).real_dim(), 26);
    }

    #[test]
    fn identity_is_neutral() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = shape(&[2, 3]);
        let a = AlgebraElement::random(&s, &mut rng);
        let one = AlgebraElement::identity(&s);
        assert!((&one * &a).approx_eq(&a, 1e-15));
    }

    #[test]
    fn example_product_gives_minus_e11() {
        let x = m2([1.0, 0.0, 0.0, 1.0]);
        let y = m2([1.0, 0.0, 0.0, 0.0]);
        let prod = &x * &(-&y);
        assert_eq!(prod, m2([-1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn product_matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = shape(&[2, 3]);
        let a = AlgebraElement::random(&s, &mut rng);
        let b = AlgebraElement::random(&s, &mut rng);
        let p = a.try_mul(&b).unwrap();
        for (blk, &d) in s.block_dims().iter().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    let mut acc = ZERO;
                    for l in 0..d {
                        acc += a.block(blk)[(i, l)] * b.block(blk)[(l, j)];
                    }
                    assert!((acc - p.block(blk)[(i, j)]).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn mismatched_shapes_are_rejected() {
        let a = AlgebraElement::identity(&shape(&[2]));
        let b = AlgebraElement::identity(&shape(&[1, 1]));
        assert!(matches!(a.try_mul(&b), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn adjoint_reverses_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = shape(&[3, 1]);
        let a = AlgebraElement::random(&s, &mut rng);
        let b = AlgebraElement::random(&s, &mut rng);
        let lhs = (&a * &b).adjoint();
        let rhs = &b.adjoint() * &a.adjoint();
        assert!(lhs.approx_eq(&rhs, 1e-14));
    }

    #[test]
    fn norms_of_simple_elements() {
        assert!((AlgebraElement::identity(&shape(&[2])).norm() - 1.0).abs() < 1e-15);
        assert!((m2([1.0, 0.0, 0.0, 0.0]).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn norm_matches_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = shape(&[2, 3, 4]);
        for _ in 0..20 {
            let a = AlgebraElement::random(&s, &mut rng);
            let svd_norm = a
                .blocks()
                .iter()
                .map(|b| b.clone().singular_values().max())
                .fold(0.0, f64::max);
            assert!((a.norm() - svd_norm).abs() < 1e-10 * (1.0 + svd_norm));
        }
    }

    #[test]
    fn positivity() {
        assert!(AlgebraElement::zeros(&shape(&[2])).is_positive(1e-9));
        assert!(!m2([1.0, 0.0, 0.0, -1.0]).is_positive(1e-9));
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let c = AlgebraElement::random(&shape(&[3, 2]), &mut rng);
        assert!((&c.adjoint() * &c).is_positive(1e-9));
        // Non-Hermitian input is reported, not symmetrized.
        assert!(!m2([1.0, 1.0, 0.0, 1.0]).is_positive(1e-9));
    }

    #[test]
    fn square_roots() {
        let s = shape(&[2]);
        let one = AlgebraElement::identity(&s);
        assert!(one.sqrt_positive(1e-9).unwrap().approx_eq(&one, 1e-14));
        let d = m2([4.0, 0.0, 0.0, 9.0]).sqrt_positive(1e-9).unwrap();
        assert!(d.approx_eq(&m2([2.0, 0.0, 0.0, 3.0]), 1e-14));
        assert!(matches!(
            m2([1.0, 0.0, 0.0, -1.0]).sqrt_positive(1e-9),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn sqrt_of_gram_is_polar_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = shape(&[3]);
        for _ in 0..10 {
            let c = AlgebraElement::random(&s, &mut rng);
            let p = (&c.adjoint() * &c).sqrt_positive(1e-9).unwrap();
            // Oracle: |c| = V Σ V* from the SVD c = U Σ V*.
            let svd = c.block(0).clone().svd(true, true);
            let v_t = svd.v_t.unwrap();
            let sigma = CMatrix::from_diagonal(&svd.singular_values.map(c_re));
            let polar = v_t.adjoint() * sigma * v_t;
            assert!((p.block(0) - polar).norm() < 1e-8);
        }
    }

    fn c_re(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn inverses() {
        let s = shape(&[2]);
        let one = AlgebraElement::identity(&s);
        assert!(one.try_inverse(1e-10).unwrap().approx_eq(&one, 1e-15));
        match m2([1.0, 0.0, 0.0, 0.0]).try_inverse(1e-10) {
            Err(Error::NotInvertible {
                block,
                min_singular,
            }) => {
                assert_eq!(block, 0);
                assert!(min_singular < 1e-15);
            }
            other => panic!("expected NotInvertible, got {other:?}"),
        }
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let s = shape(&[2, 3]);
        let a = &AlgebraElement::random(&s, &mut rng) + &AlgebraElement::scalar(&s, c(4.0, 0.0));
        let inv = a.try_inverse(1e-10).unwrap();
        assert!((&a * &inv).approx_eq(&AlgebraElement::identity(&s), 1e-9));
    }

    #[test]
    fn states() {
        let s = shape(&[2]);
        let e1 = CVector::from_vec(vec![ONE, ZERO]);
        let phi = State::pure(&s, 0, &e1).unwrap();
        assert!((phi.apply(&AlgebraElement::identity(&s)).unwrap() - ONE).norm() < 1e-15);
        assert!((phi.apply(&m2([1.0, 0.0, 0.0, 0.0])).unwrap() - ONE).norm() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let s = shape(&[1, 2, 3]);
        let phi = State::random(&s, &mut rng);
        assert!((phi.apply(&AlgebraElement::identity(&s)).unwrap() - ONE).norm() < 1e-12);
        for _ in 0..20 {
            let a = AlgebraElement::random(&s, &mut rng);
            assert!(phi.apply(&(&a.adjoint() * &a)).unwrap().re >= -1e-12);
        }
    }

    #[test]
    fn invalid_states_are_rejected() {
        let s = shape(&[2]);
        let bad = CMatrix::from_diagonal(&CVector::from_vec(vec![c(2.0, 0.0), c(-1.0, 0.0)]));
        assert!(State::new(s.clone(), vec![bad], vec![1.0]).is_err());
        let ok = CMatrix::identity(2, 2) / c(2.0, 0.0);
        assert!(State::new(s, vec![ok], vec![0.5]).is_err());
    }

    #[test]
    fn characters_on_abelian_shapes() {
        let s = shape(&[1, 1, 1]);
        let chars = characters(&s).expect("abelian");
        assert_eq!(chars.len(), 3);
        // Totality on the coordinate basis: each basis element is detected by some character.
        for i in 0..3 {
            let mut v = vec![ZERO; 3];
            v[i] = ONE;
            let e = AlgebraElement::from_diagonal_values(&v);
            assert!(chars
                .evaluate_all(&e)
                .unwrap()
                .iter()
                .any(|z| z.norm() > 0.5));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = AlgebraElement::random(&s, &mut rng);
        let b = AlgebraElement::random(&s, &mut rng);
        for i in 0..3 {
            let lhs = chars.evaluate(i, &(&a * &b)).unwrap();
            let rhs = chars.evaluate(i, &a).unwrap() * chars.evaluate(i, &b).unwrap();
            assert!((lhs - rhs).norm() < 1e-13);
            assert!(
                (chars.evaluate(i, &AlgebraElement::identity(&s)).unwrap() - ONE).norm() < 1e-15
            );
        }
    }

    /// A linear functional on `M_2` is fixed by its values `f_ij` on the matrix units.
    /// Multiplicativity forces `f_ii ∈ {0, 1}`; enumerate those and check the remaining
    /// unit relations, showing no assignment also has `φ(1) = 1`.
    fn m2_admits_character() -> bool {
        for f11 in [0.0, 1.0] {
            for f22 in [0.0, 1.0] {
                // E11·E22 = 0 and E22·E11 = 0.
                if f11 * f22 != 0.0 {
                    continue;
                }
                // E12·E21 = E11 and E21·E12 = E22 force f11 = f12 f21 = f22.
                if f11 != f22 {
                    continue;
                }
                if f11 + f22 == 1.0 {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn no_characters_with_matrix_blocks() {
        assert!(!m2_admits_character());
        assert!(characters(&shape(&[2])).is_none());
        assert!(characters(&shape(&[1, 2])).is_none());
    }

    #[test]
    fn abelian_sup_norm_is_max_character() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let s = shape(&[1, 1, 1, 1]);
        let chars = characters(&s).unwrap();
        for _ in 0..20 {
            let a = AlgebraElement::random(&s, &mut rng);
            let best = chars
                .evaluate_all(&a)
                .unwrap()
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!((best - a.norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = AlgebraElement::random(&shape(&[2, 1]), &mut rng);
        let text = serde_json::to_string(&a).unwrap();
        let back: AlgebraElement = serde_json::from_str(&text).unwrap();
        assert_eq!(a, back);
        let phi = State::random(&shape(&[2, 1]), &mut rng);
        let back: State = serde_json::from_str(&serde_json::to_string(&phi).unwrap()).unwrap();
        assert_eq!(phi, back);
    }

    #[test]
    fn json_rejects_nonconforming_blocks() {
        let text = r#"{"shape":[2],"blocks":[[[[1,0]]]]}"#;
        assert!(serde_json::from_str::<AlgebraElement>(text).is_err());
    }
}
