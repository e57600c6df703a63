//! The standard Hilbert module `Aᵏ` over a block algebra.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{matrix_from_repr, matrix_to_repr, AlgebraElement, AlgebraShape, MatrixRepr};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, I, ONE};

/// A `k`-tuple of algebra elements with inner product `⟨x, y⟩ = Σ x_i* y_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorRepr", into = "VectorRepr")]
pub struct ModuleVector {
    shape: AlgebraShape,
    entries: Vec<AlgebraElement>,
}

impl ModuleVector {
    pub fn new(entries: Vec<AlgebraElement>) -> Result<Self> {
        let shape = entries
            .first()
            .ok_or_else(|| Error::DimensionMismatch("a module vector needs k ≥ 1 entries".into()))?
            .shape()
            .clone();
        for e in &entries[1..] {
            shape.check_same(e.shape())?;
        }
        Ok(Self { shape, entries })
    }

    pub fn zeros(shape: &AlgebraShape, k: usize) -> Self {
        Self {
            shape: shape.clone(),
            entries: vec![AlgebraElement::zeros(shape); k],
        }
    }

    /// Vector with every entry equal to the unit.
    pub fn ones(shape: &AlgebraShape, k: usize) -> Self {
        Self {
            shape: shape.clone(),
            entries: vec![AlgebraElement::identity(shape); k],
        }
    }

    /// The rank-one module `A¹` containing `a`.
    pub fn single(a: AlgebraElement) -> Self {
        Self {
            shape: a.shape().clone(),
            entries: vec![a],
        }
    }

    pub fn random<R: Rng + ?Sized>(shape: &AlgebraShape, k: usize, rng: &mut R) -> Self {
        let entries = (0..k).map(|_| AlgebraElement::random(shape, rng)).collect();
        Self {
            shape: shape.clone(),
            entries,
        }
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn k(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[AlgebraElement] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> &AlgebraElement {
        &self.entries[i]
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        self.shape.check_same(&other.shape)?;
        if self.k() != other.k() {
            return Err(Error::DimensionMismatch(format!(
                "module ranks differ: {} vs {}",
                self.k(),
                other.k()
            )));
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&AlgebraElement, &AlgebraElement) -> AlgebraElement,
    ) -> Result<Self> {
        self.check_compatible(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(Self {
            shape: self.shape.clone(),
            entries,
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Complex scalar multiple `αx`.
    pub fn scale(&self, alpha: Complex64) -> Self {
        Self {
            shape: self.shape.clone(),
            entries: self.entries.iter().map(|e| e.scale(alpha)).collect(),
        }
    }

    /// `x + αy`.
    pub fn axpy(&self, alpha: Complex64, y: &Self) -> Result<Self> {
        self.zip_with(y, |a, b| a + &b.scale(alpha))
    }

    /// Right action `x·a`, entrywise.
    pub fn right_action(&self, a: &AlgebraElement) -> Result<Self> {
        self.shape.check_same(a.shape())?;
        Ok(Self {
            shape: self.shape.clone(),
            entries: self.entries.iter().map(|e| e * a).collect(),
        })
    }

    /// `⟨self, other⟩ = Σ self_i* other_i`.
    pub fn inner_product(&self, other: &Self) -> Result<AlgebraElement> {
        self.check_compatible(other)?;
        let mut acc = AlgebraElement::zeros(&self.shape);
        for (a, b) in self.entries.iter().zip(&other.entries) {
            acc = &acc + &(&a.adjoint() * b);
        }
        Ok(acc)
    }

    /// `⟨x, x⟩ = |x|²`.
    pub fn squared_modulus(&self) -> AlgebraElement {
        self.inner_product(self).expect("self-compatible")
    }

    /// `|x|`, the positive square root of `⟨x, x⟩`.
    pub fn modulus(&self, psd_tol: f64) -> Result<AlgebraElement> {
        self.squared_modulus().sqrt_positive(psd_tol)
    }

    /// `‖x‖ = √‖⟨x, x⟩‖`.
    pub fn norm(&self) -> f64 {
        self.squared_modulus().norm().sqrt()
    }

    /// Entrywise comparison, tolerance scaled by the larger of the two norms.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.check_compatible(other).is_err() {
            return false;
        }
        let diff = self.try_sub(other).expect("compatible").norm();
        diff <= tol * (1.0 + self.norm().max(other.norm()))
    }

    /// Complex coordinates: entry by entry, then block by block, row-major.
    pub fn to_complex_coords(&self) -> CVector {
        let coords: Vec<Complex64> = self
            .entries
            .iter()
            .flat_map(|e| e.to_complex_coords())
            .collect();
        CVector::from_vec(coords)
    }

    pub fn from_complex_coords(shape: &AlgebraShape, k: usize, coords: &CVector) -> Result<Self> {
        let per = shape.complex_dim();
        if coords.len() != per * k {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coordinates, got {}",
                per * k,
                coords.len()
            )));
        }
        let entries = (0..k)
            .map(|i| {
                AlgebraElement::from_complex_coords(
                    shape,
                    &coords.as_slice()[i * per..(i + 1) * per],
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            shape: shape.clone(),
            entries,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct VectorRepr {
    k: usize,
    entries: Vec<AlgebraElement>,
}

impl TryFrom<VectorRepr> for ModuleVector {
    type Error = Error;
    fn try_from(r: VectorRepr) -> Result<Self> {
        if r.k != r.entries.len() {
            return Err(Error::DimensionMismatch(format!(
                "k = {} but {} entries were given",
                r.k,
                r.entries.len()
            )));
        }
        ModuleVector::new(r.entries)
    }
}

impl From<ModuleVector> for VectorRepr {
    fn from(v: ModuleVector) -> Self {
        VectorRepr {
            k: v.k(),
            entries: v.entries,
        }
    }
}

/// `θ_{x,y}(z) = x⟨y, z⟩`.
pub fn theta_map(x: &ModuleVector, y: &ModuleVector, z: &ModuleVector) -> Result<ModuleVector> {
    x.check_compatible(y)?;
    x.right_action(&y.inner_product(z)?)
}

/// A complex-linear map between standard modules over the same algebra.
pub trait ModuleMap {
    fn shape(&self) -> &AlgebraShape;
    fn in_k(&self) -> usize;
    fn out_k(&self) -> usize;
    fn apply(&self, x: &ModuleVector) -> Result<ModuleVector>;
}

/// An `A`-linear map `Aᵏ → Aᵐ` given by a matrix of algebra coefficients acting on the left.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AMapRepr", into = "AMapRepr")]
pub struct AModuleMap {
    shape: AlgebraShape,
    coeffs: Vec<Vec<AlgebraElement>>,
}

impl AModuleMap {
    pub fn new(coeffs: Vec<Vec<AlgebraElement>>) -> Result<Self> {
        let first_row = coeffs
            .first()
            .ok_or_else(|| Error::DimensionMismatch("map needs ≥ 1 row".into()))?;
        let cols = first_row.len();
        let shape = first_row
            .first()
            .ok_or_else(|| Error::DimensionMismatch("map needs ≥ 1 column".into()))?
            .shape()
            .clone();
        for row in &coeffs {
            if row.len() != cols {
                return Err(Error::DimensionMismatch("ragged coefficient rows".into()));
            }
            for c in row {
                shape.check_same(c.shape())?;
            }
        }
        Ok(Self { shape, coeffs })
    }

    pub fn identity(shape: &AlgebraShape, k: usize) -> Self {
        Self::diagonal(shape, &vec![AlgebraElement::identity(shape); k])
    }

    /// `γ · id`.
    pub fn scaled_identity(shape: &AlgebraShape, k: usize, gamma: f64) -> Self {
        Self::diagonal(
            shape,
            &vec![AlgebraElement::scalar(shape, Complex64::new(gamma, 0.0)); k],
        )
    }

    pub fn diagonal(shape: &AlgebraShape, diag: &[AlgebraElement]) -> Self {
        let k = diag.len();
        let coeffs = (0..k)
            .map(|r| {
                (0..k)
                    .map(|c| {
                        if r == c {
                            diag[r].clone()
                        } else {
                            AlgebraElement::zeros(shape)
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            shape: shape.clone(),
            coeffs,
        }
    }

    /// Left multiplication by the entries of a unitary matrix `U ∈ M_k(A)`; preserves `⟨·,·⟩`.
    pub fn random_unitary<R: Rng + ?Sized>(shape: &AlgebraShape, k: usize, rng: &mut R) -> Self {
        // A unitary in M_k(M_d) per block is a unitary kd × kd matrix cut into d × d pieces.
        let per_block: Vec<CMatrix> = shape
            .block_dims()
            .iter()
            .map(|&d| linalg::random_unitary(k * d, rng))
            .collect();
        let coeffs = (0..k)
            .map(|r| {
                (0..k)
                    .map(|c| {
                        let blocks = per_block
                            .iter()
                            .zip(shape.block_dims())
                            .map(|(u, &d)| u.view((r * d, c * d), (d, d)).into_owned())
                            .collect();
                        AlgebraElement::from_blocks(shape.clone(), blocks)
                            .expect("conforming blocks")
                    })
                    .collect()
            })
            .collect();
        Self {
            shape: shape.clone(),
            coeffs,
        }
    }

    /// Coefficients drawn independently at random.
    pub fn random<R: Rng + ?Sized>(
        shape: &AlgebraShape,
        rows: usize,
        cols: usize,
        rng: &mut R,
    ) -> Self {
        let coeffs = (0..rows)
            .map(|_| {
                (0..cols)
                    .map(|_| AlgebraElement::random(shape, rng))
                    .collect()
            })
            .collect();
        Self {
            shape: shape.clone(),
            coeffs,
        }
    }

    pub fn coeffs(&self) -> &[Vec<AlgebraElement>] {
        &self.coeffs
    }

    pub fn scale(&self, gamma: Complex64) -> Self {
        Self {
            shape: self.shape.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|row| row.iter().map(|c| c.scale(gamma)).collect())
                .collect(),
        }
    }

    /// The same map written as a dense matrix on complex coordinates.
    pub fn to_clinear(&self) -> CLinearMap {
        let shape = self.shape.clone();
        let in_k = self.in_k();
        let out_k = self.out_k();
        let in_dim = shape.complex_dim() * in_k;
        let mut dense = CMatrix::zeros(shape.complex_dim() * out_k, in_dim);
        for j in 0..in_dim {
            let mut e = CVector::zeros(in_dim);
            e[j] = ONE;
            let x = ModuleVector::from_complex_coords(&shape, in_k, &e).expect("basis vector");
            let col = self.apply(&x).expect("compatible").to_complex_coords();
            dense.set_column(j, &col);
        }
        CLinearMap {
            shape,
            in_k,
            out_k,
            dense,
        }
    }
}

impl ModuleMap for AModuleMap {
    fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    fn in_k(&self) -> usize {
        self.coeffs[0].len()
    }

    fn out_k(&self) -> usize {
        self.coeffs.len()
    }

    fn apply(&self, x: &ModuleVector) -> Result<ModuleVector> {
        self.shape.check_same(x.shape())?;
        if x.k() != self.in_k() {
            return Err(Error::DimensionMismatch(format!(
                "map expects k = {}, got {}",
                self.in_k(),
                x.k()
            )));
        }
        let entries = self
            .coeffs
            .iter()
            .map(|row| {
                row.iter()
                    .zip(x.entries())
                    .fold(AlgebraElement::zeros(&self.shape), |acc, (c, xi)| {
                        &acc + &(c * xi)
                    })
            })
            .collect();
        Ok(ModuleVector {
            shape: self.shape.clone(),
            entries,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct AMapRepr {
    rows: usize,
    cols: usize,
    coeffs: Vec<Vec<AlgebraElement>>,
}

impl TryFrom<AMapRepr> for AModuleMap {
    type Error = Error;
    fn try_from(r: AMapRepr) -> Result<Self> {
        if r.coeffs.len() != r.rows || r.coeffs.iter().any(|row| row.len() != r.cols) {
            return Err(Error::DimensionMismatch(
                "coefficient array does not match rows/cols".into(),
            ));
        }
        AModuleMap::new(r.coeffs)
    }
}

impl From<AModuleMap> for AMapRepr {
    fn from(m: AModuleMap) -> Self {
        AMapRepr {
            rows: m.out_k(),
            cols: m.in_k(),
            coeffs: m.coeffs,
        }
    }
}

/// A complex-linear map given by a dense matrix on flattened coordinates.
/// Need not commute with the right `A`-action.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CMapRepr", into = "CMapRepr")]
pub struct CLinearMap {
    shape: AlgebraShape,
    in_k: usize,
    out_k: usize,
    dense: CMatrix,
}

impl CLinearMap {
    pub fn new(shape: AlgebraShape, in_k: usize, out_k: usize, dense: CMatrix) -> Result<Self> {
        let d = shape.complex_dim();
        if dense.nrows() != d * out_k || dense.ncols() != d * in_k {
            return Err(Error::DimensionMismatch(format!(
                "dense matrix is {}x{}, expected {}x{}",
                dense.nrows(),
                dense.ncols(),
                d * out_k,
                d * in_k
            )));
        }
        Ok(Self {
            shape,
            in_k,
            out_k,
            dense,
        })
    }

    pub fn random<R: Rng + ?Sized>(
        shape: &AlgebraShape,
        in_k: usize,
        out_k: usize,
        rng: &mut R,
    ) -> Self {
        let d = shape.complex_dim();
        let dense = linalg::random_matrix(d * out_k, d * in_k, rng);
        Self {
            shape: shape.clone(),
            in_k,
            out_k,
            dense,
        }
    }

    pub fn dense(&self) -> &CMatrix {
        &self.dense
    }

    /// `self + eps · noise`, for perturbation experiments.
    pub fn perturbed<R: Rng + ?Sized>(&self, eps: f64, rng: &mut R) -> Self {
        let noise = linalg::random_matrix(self.dense.nrows(), self.dense.ncols(), rng);
        Self {
            dense: &self.dense + noise * Complex64::new(eps, 0.0),
            ..self.clone()
        }
    }

    pub fn scale(&self, gamma: Complex64) -> Self {
        Self {
            dense: &self.dense * gamma,
            ..self.clone()
        }
    }
}

impl ModuleMap for CLinearMap {
    fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    fn in_k(&self) -> usize {
        self.in_k
    }

    fn out_k(&self) -> usize {
        self.out_k
    }

    fn apply(&self, x: &ModuleVector) -> Result<ModuleVector> {
        self.shape.check_same(x.shape())?;
        if x.k() != self.in_k {
            return Err(Error::DimensionMismatch(format!(
                "map expects k = {}, got {}",
                self.in_k,
                x.k()
            )));
        }
        let out = &self.dense * x.to_complex_coords();
        ModuleVector::from_complex_coords(&self.shape, self.out_k, &out)
    }
}

#[derive(Serialize, Deserialize)]
struct CMapRepr {
    shape: AlgebraShape,
    in_k: usize,
    out_k: usize,
    dense: MatrixRepr,
}

impl TryFrom<CMapRepr> for CLinearMap {
    type Error = Error;
    fn try_from(r: CMapRepr) -> Result<Self> {
        CLinearMap::new(r.shape, r.in_k, r.out_k, matrix_from_repr(&r.dense)?)
    }
}

impl From<CLinearMap> for CMapRepr {
    fn from(m: CLinearMap) -> Self {
        CMapRepr {
            dense: matrix_to_repr(&m.dense),
            shape: m.shape,
            in_k: m.in_k,
            out_k: m.out_k,
        }
    }
}

/// Numerical tolerances shared by every decision procedure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Equality of algebra elements.
    pub eq_tol: f64,
    /// Eigenvalue floor for positivity.
    pub psd_tol: f64,
    /// Optimizer stationarity and optimal-value slack.
    pub opt_tol: f64,
    /// Relative smallest-singular-value threshold for invertibility.
    pub sing_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            eq_tol: 1e-8,
            psd_tol: 1e-9,
            opt_tol: 1e-7,
            sing_tol: 1e-10,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eq_tol", self.eq_tol),
            ("psd_tol", self.psd_tol),
            ("opt_tol", self.opt_tol),
            ("sing_tol", self.sing_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// `⟨Tx, Ty⟩` recovered from four moduli through the polarization identity
/// `¼(|Ty+Tx|² − |Ty−Tx|² − i|iTy+Tx|² + i|iTy−Tx|²)`.
pub fn polarization_gram(
    t: &dyn ModuleMap,
    x: &ModuleVector,
    y: &ModuleVector,
) -> Result<AlgebraElement> {
    let tx = t.apply(x)?;
    let ty = t.apply(y)?;
    let i_ty = ty.scale(I);
    let terms = [
        (ty.try_add(&tx)?, Complex64::new(0.25, 0.0)),
        (ty.try_sub(&tx)?, Complex64::new(-0.25, 0.0)),
        (i_ty.try_add(&tx)?, Complex64::new(0.0, -0.25)),
        (i_ty.try_sub(&tx)?, Complex64::new(0.0, 0.25)),
    ];
    let shape = t.shape();
    Ok(terms
        .iter()
        .fold(AlgebraElement::zeros(shape), |acc, (v, w)| {
            &acc + &v.squared_modulus().scale(*w)
        }))
}
