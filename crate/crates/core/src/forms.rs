//! Multi-A-linear forms on `(Aᵏ)ⁿ` in coefficient form, strongness and boundedness probes,
//! kernel construction, and the factorization `F = cE` of kernel-preserving pairs.
//!
//! A form of arity `n` is stored as a dense tensor of algebra coefficients `c_{i₁…iₙ}`:
//!
//! * `n = 1`: `E(x) = Σ c_i x_i`, right `A`-linear over any algebra.
//! * `n = 2`: `E(x, y) = Σ x_i* c_ij y_j`, conjugate-linear in `x`, linear in `y`, over any algebra.
//! * `n ≥ 3`: `E(x₁,…,xₙ) = Σ x₁* c x₂ x₃* x₄ …`; odd slots (counted from one) are conjugated.
//!   These satisfy the slot axioms only over commutative algebras, so the shape must be abelian.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, AlgebraShape};
use crate::error::{Error, Result};
use crate::module::{AModuleMap, ModuleMap, ModuleVector, ToleranceConfig};
use crate::report::{MapFixture, ReplayCase, VerificationReport};
use crate::sampling::trial_rng;

/// Whether slot `j` (zero-based) of an arity-`n` form is conjugate-linear.
pub fn slot_is_conjugate(n: usize, j: usize) -> bool {
    n >= 2 && j % 2 == 0
}

/// A multi-A-linear form given by its coefficient tensor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FormRepr", into = "FormRepr")]
pub struct MultiForm {
    shape: AlgebraShape,
    k: usize,
    n: usize,
    /// Row-major over multi-indices, the first slot most significant.
    coeffs: Vec<AlgebraElement>,
}

impl MultiForm {
    pub fn new(
        shape: AlgebraShape,
        k: usize,
        n: usize,
        coeffs: Vec<AlgebraElement>,
    ) -> Result<Self> {
        if k == 0 || n == 0 {
            return Err(Error::DimensionMismatch(
                "forms need k ≥ 1 and n ≥ 1".into(),
            ));
        }
        let len = k.checked_pow(n as u32).ok_or_else(|| {
            Error::DimensionMismatch(format!("k^n overflows for k = {k}, n = {n}"))
        })?;
        if coeffs.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "expected {len} coefficients, got {}",
                coeffs.len()
            )));
        }
        for c in &coeffs {
            shape.check_same(c.shape())?;
        }
        if n >= 3 && !shape.is_abelian() {
            return Err(Error::UnsupportedShape {
                shape: shape.block_dims().to_vec(),
                arity: n,
                reason:
                    "coefficient forms of arity ≥ 3 are multi-A-linear only over abelian algebras"
                        .into(),
            });
        }
        Ok(Self {
            shape,
            k,
            n,
            coeffs,
        })
    }

    /// Coefficients `f(i₁, …, iₙ)`.
    pub fn from_fn(
        shape: &AlgebraShape,
        k: usize,
        n: usize,
        mut f: impl FnMut(&[usize]) -> AlgebraElement,
    ) -> Result<Self> {
        let len = k.pow(n as u32);
        let coeffs = (0..len).map(|t| f(&multi_index(t, k, n))).collect();
        Self::new(shape.clone(), k, n, coeffs)
    }

    pub fn zero(shape: &AlgebraShape, k: usize, n: usize) -> Result<Self> {
        Self::from_fn(shape, k, n, |_| AlgebraElement::zeros(shape))
    }

    /// The inner product `E(x, y) = ⟨x, y⟩`.
    pub fn gram(shape: &AlgebraShape, k: usize) -> Self {
        Self::from_fn(shape, k, 2, |idx| {
            if idx[0] == idx[1] {
                AlgebraElement::identity(shape)
            } else {
                AlgebraElement::zeros(shape)
            }
        })
        .expect("arity 2 is valid over any shape")
    }

    /// Standard-normal coefficients.
    pub fn random<R: Rng + ?Sized>(
        shape: &AlgebraShape,
        k: usize,
        n: usize,
        rng: &mut R,
    ) -> Result<Self> {
        Self::from_fn(shape, k, n, |_| AlgebraElement::random(shape, rng))
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[AlgebraElement] {
        &self.coeffs
    }

    pub fn coeff(&self, idx: &[usize]) -> &AlgebraElement {
        let t = idx.iter().fold(0, |acc, &i| acc * self.k + i);
        &self.coeffs[t]
    }

    /// `Σ ‖c_i‖`, an upper bound for `M` in `‖E(x₁,…,xₙ)‖ ≤ M ∏‖x_j‖`.
    pub fn coefficient_bound(&self) -> f64 {
        self.coeffs.iter().map(AlgebraElement::norm).sum()
    }

    fn check_args(&self, args: &[ModuleVector]) -> Result<()> {
        if args.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "form has arity {}, got {} arguments",
                self.n,
                args.len()
            )));
        }
        for a in args {
            self.shape.check_same(a.shape())?;
            if a.k() != self.k {
                return Err(Error::DimensionMismatch(format!(
                    "form acts on rank {}, got rank {}",
                    self.k,
                    a.k()
                )));
            }
        }
        Ok(())
    }

    /// `E(x₁, …, xₙ)`.
    pub fn eval(&self, args: &[ModuleVector]) -> Result<AlgebraElement> {
        self.check_args(args)?;
        let mut total = AlgebraElement::zeros(&self.shape);
        for (t, c) in self.coeffs.iter().enumerate() {
            let idx = multi_index(t, self.k, self.n);
            let term = if self.n == 1 {
                c * args[0].entry(idx[0])
            } else {
                let mut acc = &args[0].entry(idx[0]).adjoint() * c;
                for j in 1..self.n {
                    let e = args[j].entry(idx[j]);
                    acc = if slot_is_conjugate(self.n, j) {
                        &acc * &e.adjoint()
                    } else {
                        &acc * e
                    };
                }
                acc
            };
            total = &total + &term;
        }
        Ok(total)
    }

    /// `E(w, …, w)`.
    pub fn eval_diagonal(&self, w: &ModuleVector) -> Result<AlgebraElement> {
        self.eval(&vec![w.clone(); self.n])
    }

    /// The form `cE`. Needs `n = 1`, an abelian shape, or a central `c`.
    pub fn left_multiply(&self, c: &AlgebraElement) -> Result<Self> {
        self.shape.check_same(c.shape())?;
        if self.n >= 2 && !self.shape.is_abelian() && !is_central(c) {
            return Err(Error::UnsupportedShape {
                shape: self.shape.block_dims().to_vec(),
                arity: self.n,
                reason: "cE is a coefficient form only for central c when A is not abelian".into(),
            });
        }
        let coeffs = self.coeffs.iter().map(|e| c * e).collect();
        Ok(Self {
            coeffs,
            ..self.clone()
        })
    }

    /// The arity `n − 1` form `E_b(x₁,…,x_{n−1}) = E(x₁,…,x_{n−1}, b)`; needs `n ≥ 3`.
    pub fn slice_last(&self, b: &ModuleVector) -> Result<Self> {
        if self.n < 3 {
            return Err(Error::Domain(
                "slicing keeps the slot pattern only from arity 3 down to 2".into(),
            ));
        }
        self.shape.check_same(b.shape())?;
        let conj = slot_is_conjugate(self.n, self.n - 1);
        let inner = self.k.pow((self.n - 1) as u32);
        let coeffs = (0..inner)
            .map(|t| {
                (0..self.k).fold(AlgebraElement::zeros(&self.shape), |acc, j| {
                    let c = &self.coeffs[t * self.k + j];
                    let bj = if conj {
                        b.entry(j).adjoint()
                    } else {
                        b.entry(j).clone()
                    };
                    &acc + &(c * &bj)
                })
            })
            .collect();
        Self::new(self.shape.clone(), self.k, self.n - 1, coeffs)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.k != other.k || self.n != other.n {
            return Err(Error::DimensionMismatch(
                "forms of different rank or arity".into(),
            ));
        }
        self.shape.check_same(other.shape())?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            coeffs,
            ..self.clone()
        })
    }
}

fn multi_index(mut t: usize, k: usize, n: usize) -> Vec<usize> {
    let mut idx = vec![0; n];
    for slot in (0..n).rev() {
        idx[slot] = t % k;
        t /= k;
    }
    idx
}

/// Each block a multiple of the identity.
fn is_central(c: &AlgebraElement) -> bool {
    c.blocks().iter().all(|b| {
        let d = b.nrows();
        let lambda = b.trace() / Complex64::new(d as f64, 0.0);
        let off = b - crate::linalg::CMatrix::identity(d, d) * lambda;
        crate::linalg::max_abs_entry(&off) <= 1e-14 * (1.0 + crate::linalg::max_abs_entry(b))
    })
}

#[derive(Serialize, Deserialize)]
struct FormRepr {
    shape: AlgebraShape,
    n: usize,
    k: usize,
    /// Nonzero coefficients keyed by comma-separated zero-based multi-indices.
    coeffs: BTreeMap<String, AlgebraElement>,
}

impl TryFrom<FormRepr> for MultiForm {
    type Error = Error;

    fn try_from(r: FormRepr) -> Result<Self> {
        if r.k == 0 || r.n == 0 {
            return Err(Error::DimensionMismatch(
                "forms need k ≥ 1 and n ≥ 1".into(),
            ));
        }
        let len =
            r.k.checked_pow(r.n as u32)
                .filter(|&l| l <= 1 << 20)
                .ok_or_else(|| Error::DimensionMismatch("coefficient tensor too large".into()))?;
        let mut coeffs = vec![AlgebraElement::zeros(&r.shape); len];
        for (key, value) in r.coeffs {
            let idx: Vec<usize> = key
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::DimensionMismatch(format!("bad multi-index key `{key}`")))?;
            if idx.len() != r.n || idx.iter().any(|&i| i >= r.k) {
                return Err(Error::DimensionMismatch(format!(
                    "multi-index `{key}` out of range"
                )));
            }
            let t = idx.iter().fold(0, |acc, &i| acc * r.k + i);
            coeffs[t] = value;
        }
        MultiForm::new(r.shape, r.k, r.n, coeffs)
    }
}

impl From<MultiForm> for FormRepr {
    fn from(f: MultiForm) -> Self {
        let coeffs = f
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| {
                c.blocks()
                    .iter()
                    .any(|b| b.iter().any(|z| *z != Complex64::new(0.0, 0.0)))
            })
            .map(|(t, c)| {
                let key = multi_index(t, f.k, f.n)
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(",");
                (key, c.clone())
            })
            .collect();
        Self {
            shape: f.shape,
            n: f.n,
            k: f.k,
            coeffs,
        }
    }
}

/// `E(x₁,…,xₙ)`.
pub fn eval_form(form: &MultiForm, args: &[ModuleVector]) -> Result<AlgebraElement> {
    form.eval(args)
}

/// `E(x, y) = ⟨x, y⟩` and `F(x, y) = ⟨Tx, Sy⟩` as coefficient forms.
pub fn gram_pair_from_maps(t: &AModuleMap, s: &AModuleMap) -> Result<(MultiForm, MultiForm)> {
    t.shape().check_same(s.shape())?;
    if t.in_k() != s.in_k() || t.out_k() != s.out_k() {
        return Err(Error::DimensionMismatch(
            "T and S must act between the same modules".into(),
        ));
    }
    let shape = t.shape().clone();
    let k = t.in_k();
    let (tc, sc) = (t.coeffs(), s.coeffs());
    let f = MultiForm::from_fn(&shape, k, 2, |idx| {
        (0..t.out_k()).fold(AlgebraElement::zeros(&shape), |acc, r| {
            &acc + &(&tc[r][idx[0]].adjoint() * &sc[r][idx[1]])
        })
    })?;
    Ok((MultiForm::gram(&shape, k), f))
}

/// A vector `w` with `E(w, …, w)` invertible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongWitness {
    pub w: ModuleVector,
    pub value: AlgebraElement,
    pub min_singular: f64,
}

/// Try `w = (1, …, 1)`, then up to `budget` standard-normal vectors.
pub fn find_strong_witness(
    form: &MultiForm,
    budget: usize,
    seed: u64,
    cfg: &ToleranceConfig,
) -> Result<StrongWitness> {
    let ones = ModuleVector::ones(form.shape(), form.k());
    let mut rng = trial_rng(seed, STREAM_WITNESS, 0);
    for attempt in 0..=budget {
        let w = if attempt == 0 {
            ones.clone()
        } else {
            ModuleVector::random(form.shape(), form.k(), &mut rng)
        };
        let value = form.eval_diagonal(&w)?;
        if value.try_inverse(cfg.sing_tol).is_ok() {
            let min_singular = value.min_singular_value().1;
            return Ok(StrongWitness {
                w,
                value,
                min_singular,
            });
        }
    }
    Err(Error::NotStrong { budget })
}

const STREAM_WITNESS: u64 = 0xF0;
const STREAM_BOUND: u64 = 0xF1;
const STREAM_BALL: u64 = 0xF2;
const STREAM_VALIDATE: u64 = 0xF3;
const STREAM_KERNEL: u64 = 0xF4;
const STREAM_INVERTIBLE: u64 = 0xF5;
const STREAM_ISOMETRY: u64 = 0xF6;

fn unit_vector<R: Rng + ?Sized>(shape: &AlgebraShape, k: usize, rng: &mut R) -> ModuleVector {
    loop {
        let v = ModuleVector::random(shape, k, rng);
        let n = v.norm();
        if n > 1e-8 {
            return v.scale(Complex64::new(1.0 / n, 0.0));
        }
    }
}

/// Largest `‖F(x₁,…,xₙ)‖` over sampled unit-norm tuples: a lower bound for the best `M`.
/// Half the samples repeat one vector in every slot.
pub fn is_bounded_estimate(form: &MultiForm, samples: usize, seed: u64) -> f64 {
    let mut best = 0.0f64;
    for s in 0..samples {
        let mut rng = trial_rng(seed, STREAM_BOUND, s as u64);
        let args: Vec<ModuleVector> = if s % 2 == 0 {
            vec![unit_vector(form.shape(), form.k(), &mut rng); form.n()]
        } else {
            (0..form.n())
                .map(|_| unit_vector(form.shape(), form.k(), &mut rng))
                .collect()
        };
        let v = form
            .eval(&args)
            .expect("arguments built for this form")
            .norm();
        best = best.max(v);
    }
    best
}

/// Replace slot `slot` of `args` by `zb + y` with `b` chosen so that `E` vanishes there.
///
/// With every other slot fixed, a linear slot gives `E(…, zb + y, …) = E(…,z,…)b + E(…,y,…)` and
/// a conjugate slot gives `b*E(…,z,…) + E(…,y,…)`, so `b` needs `E(…,z,…)` invertible.
pub fn solve_slot(
    form: &MultiForm,
    args: &[ModuleVector],
    slot: usize,
    z: &ModuleVector,
    y: &ModuleVector,
    cfg: &ToleranceConfig,
) -> Result<ModuleVector> {
    if slot >= form.n() {
        return Err(Error::DimensionMismatch(format!(
            "slot {slot} out of range for arity {}",
            form.n()
        )));
    }
    let mut at = args.to_vec();
    at[slot] = z.clone();
    let ez = form.eval(&at)?;
    at[slot] = y.clone();
    let ey = form.eval(&at)?;
    let inv = ez
        .try_inverse(cfg.sing_tol)
        .map_err(|_| Error::Domain("partial evaluation at z is not invertible".into()))?;
    let b = if slot_is_conjugate(form.n(), slot) {
        (-&(&ey * &inv)).adjoint()
    } else {
        -&(&inv * &ey)
    };
    z.right_action(&b)?.try_add(y)
}

/// `(zb + y, zd + y)` with `E(z, zb + y) = 0` and `E(zd + y, z) = 0`, where
/// `b = −E(z,z)⁻¹E(z,y)` and `d = (−E(y,z)E(z,z)⁻¹)*`.
pub fn kernel_sample(
    form: &MultiForm,
    z: &ModuleVector,
    y: &ModuleVector,
    cfg: &ToleranceConfig,
) -> Result<(ModuleVector, ModuleVector)> {
    if form.n() != 2 {
        return Err(Error::Domain("kernel pairs are defined for arity 2".into()));
    }
    let args = [z.clone(), z.clone()];
    let right = solve_slot(form, &args, 1, z, y, cfg)?;
    let left = solve_slot(form, &args, 0, z, y, cfg)?;
    Ok((right, left))
}

/// Random tuple in the kernel of `E`, solving a random slot; `None` if the partial
/// evaluation is too ill-conditioned.
fn kernel_tuple<R: Rng + ?Sized>(
    form: &MultiForm,
    rng: &mut R,
    cfg: &ToleranceConfig,
) -> Option<Vec<ModuleVector>> {
    let (shape, k) = (form.shape(), form.k());
    let mut args: Vec<ModuleVector> = (0..form.n())
        .map(|_| ModuleVector::random(shape, k, rng))
        .collect();
    let slot = rng.random_range(0..form.n());
    let z = ModuleVector::random(shape, k, rng);
    let y = ModuleVector::random(shape, k, rng);
    let mut at = args.clone();
    at[slot] = z.clone();
    let ez = form.eval(&at).ok()?;
    if ez.min_singular_value().1 <= 1e-6 * ez.norm() {
        return None;
    }
    args[slot] = solve_slot(form, &args, slot, &z, &y, cfg).ok()?;
    Some(args)
}

fn tuple_scale(args: &[ModuleVector]) -> f64 {
    args.iter().map(ModuleVector::norm).product::<f64>()
}

/// Successful factorization `F = cE`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationResult {
    pub c: AlgebraElement,
    /// `max ‖F − cE‖ / ((1 + ‖c‖) · max(1, M_E) · ∏‖x_j‖)` over validation tuples.
    pub residual: f64,
    /// `max ‖h(z) − c‖ / (1 + ‖c‖)` for `h(z) = F(z,…,z)E(z,…,z)⁻¹` on the ball around `w`.
    pub h_variation: f64,
    /// Radius of the ball on which every `E(z,…,z)` is provably invertible.
    pub beta: f64,
    pub witness: StrongWitness,
    pub validation_samples: usize,
}

/// A tuple on which `F ≠ cE`; when `in_kernel` holds, `E` vanishes there while `F` does not.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreservationViolation {
    pub c: AlgebraElement,
    pub args: Vec<ModuleVector>,
    pub residual: f64,
    pub in_kernel: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Factorization {
    Factorized(FactorizationResult),
    PreservationViolated(PreservationViolation),
}

impl Factorization {
    pub fn result(&self) -> Option<&FactorizationResult> {
        match self {
            Factorization::Factorized(r) => Some(r),
            Factorization::PreservationViolated(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizeOptions {
    pub seed: u64,
    pub witness_budget: usize,
    pub ball_samples: usize,
    pub validation_samples: usize,
    pub kernel_samples: usize,
    /// Run arity-2 factorization over non-abelian algebras, outside the proven range.
    pub allow_nonabelian: bool,
}

impl Default for FactorizeOptions {
    fn default() -> Self {
        Self {
            seed: 42,
            witness_budget: 100,
            ball_samples: 50,
            validation_samples: 200,
            kernel_samples: 50,
            allow_nonabelian: false,
        }
    }
}

impl FactorizeOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

/// Radius `β` with `M((‖w‖ + β)ⁿ − ‖w‖ⁿ) < σ_min(E(w,…,w)) / 2`, so `E(z,…,z)` stays invertible
/// on the ball `‖z − w‖ < β`.
fn invertibility_radius(form: &MultiForm, witness: &StrongWitness) -> f64 {
    let m = form.coefficient_bound().max(f64::MIN_POSITIVE);
    let nw = witness.w.norm();
    let n = form.n() as f64;
    let r = witness.min_singular / 2.0;
    0.9 * ((nw.powf(n) + r / m).powf(1.0 / n) - nw)
}

/// Decide whether `F = cE` and recover `c = F(w,…,w)E(w,…,w)⁻¹`.
pub fn factorize_pair(
    e: &MultiForm,
    f: &MultiForm,
    cfg: &ToleranceConfig,
    opts: &FactorizeOptions,
) -> Result<Factorization> {
    e.shape().check_same(f.shape())?;
    if e.k() != f.k() || e.n() != f.n() {
        return Err(Error::DimensionMismatch(
            "E and F must share rank and arity".into(),
        ));
    }
    if e.n() >= 2 && !e.shape().is_abelian() && !opts.allow_nonabelian {
        return Err(Error::UnsupportedShape {
            shape: e.shape().block_dims().to_vec(),
            arity: e.n(),
            reason: "factorization of arity ≥ 2 needs a total set of characters, i.e. an abelian algebra".into(),
        });
    }
    let (shape, k, n) = (e.shape().clone(), e.k(), e.n());
    let witness = find_strong_witness(e, opts.witness_budget, opts.seed, cfg)?;
    let inv = witness.value.try_inverse(cfg.sing_tol)?;
    let c = &f.eval_diagonal(&witness.w)? * &inv;
    let c_scale = 1.0 + c.norm();

    let beta = invertibility_radius(e, &witness);
    let mut h_variation = 0.0f64;
    for s in 0..opts.ball_samples {
        let mut rng = trial_rng(opts.seed, STREAM_BALL, s as u64);
        let radius = beta * rng.random::<f64>();
        let z = witness.w.axpy(
            Complex64::new(radius, 0.0),
            &unit_vector(&shape, k, &mut rng),
        )?;
        let ez = e.eval_diagonal(&z)?;
        let h = &f.eval_diagonal(&z)? * &ez.try_inverse(cfg.sing_tol)?;
        h_variation = h_variation.max((&h - &c).norm() / c_scale);
    }

    let m_e = e.coefficient_bound().max(1.0);
    let mut residual = 0.0f64;
    let mut worst: Option<PreservationViolation> = None;
    let mut consider = |args: Vec<ModuleVector>, in_kernel_probe: bool| -> Result<()> {
        let scale = tuple_scale(&args);
        if scale == 0.0 {
            return Ok(());
        }
        let ev = e.eval(&args)?;
        let fv = f.eval(&args)?;
        let r = (&fv - &(&c * &ev)).norm() / (c_scale * m_e * scale);
        let in_kernel = in_kernel_probe && ev.norm() <= cfg.eq_tol * m_e * scale;
        if r > residual {
            residual = r;
        }
        if r > cfg.eq_tol
            && worst
                .as_ref()
                .is_none_or(|w| (in_kernel, r) > (w.in_kernel, w.residual))
        {
            worst = Some(PreservationViolation {
                c: c.clone(),
                args,
                residual: r,
                in_kernel,
            });
        }
        Ok(())
    };
    for s in 0..opts.kernel_samples {
        let mut rng = trial_rng(opts.seed, STREAM_KERNEL, s as u64);
        if let Some(args) = kernel_tuple(e, &mut rng, cfg) {
            consider(args, true)?;
        }
    }
    for s in 0..opts.validation_samples {
        let mut rng = trial_rng(opts.seed, STREAM_VALIDATE, s as u64);
        let args = (0..n)
            .map(|_| ModuleVector::random(&shape, k, &mut rng))
            .collect();
        consider(args, false)?;
    }
    if let Some(v) = worst {
        return Ok(Factorization::PreservationViolated(v));
    }
    Ok(Factorization::Factorized(FactorizationResult {
        c,
        residual,
        h_variation,
        beta,
        witness,
        validation_samples: opts.validation_samples,
    }))
}

/// Sample kernel tuples of `E` and check that `F` vanishes on them.
pub fn preservation_check(
    e: &MultiForm,
    f: &MultiForm,
    trials: usize,
    seed: u64,
    cfg: &ToleranceConfig,
) -> Result<VerificationReport> {
    e.shape().check_same(f.shape())?;
    if e.k() != f.k() || e.n() != f.n() {
        return Err(Error::DimensionMismatch(
            "E and F must share rank and arity".into(),
        ));
    }
    let mut report = VerificationReport::new(
        "preservation",
        "E(x₁,…,xₙ) = 0 implies F(x₁,…,xₙ) = 0",
        e.shape().block_dims(),
        e.k(),
        seed,
        *cfg,
    );
    report.n = Some(e.n());
    let m_f = f.coefficient_bound().max(1.0);
    let m_e = e.coefficient_bound().max(1.0);
    report.set_metric("max_kernel_f", 0.0);
    report.set_metric("max_kernel_e", 0.0);
    let mut worst: Option<(usize, f64, Vec<ModuleVector>)> = None;
    for trial in 0..trials {
        let mut rng = trial_rng(seed, STREAM_KERNEL, trial as u64);
        let Some(args) = (0..8).find_map(|_| kernel_tuple(e, &mut rng, cfg)) else {
            report.count("skipped_ill_conditioned");
            continue;
        };
        report.trials += 1;
        let scale = tuple_scale(&args);
        let ev = e.eval(&args)?.norm() / (m_e * scale);
        let fv = f.eval(&args)?.norm() / (m_f * scale);
        report.max_metric("max_kernel_e", ev);
        report.max_metric("max_kernel_f", fv);
        if fv > cfg.eq_tol && worst.as_ref().is_none_or(|w| fv > w.1) {
            worst = Some((trial, fv, args));
        }
    }
    if let Some((trial, fv, args)) = worst {
        report.fail(
            trial,
            "kernel tuple of E where F does not vanish",
            cfg.eq_tol - fv,
            ReplayCase::KernelViolation {
                e: e.clone(),
                f: f.clone(),
                args,
            },
        );
    }
    Ok(report)
}

/// Check that `c ∈ G_A` exactly when every sampled invertible `E`-value maps to an invertible
/// `F`-value.
pub fn invertibility_preservation(
    e: &MultiForm,
    f: &MultiForm,
    trials: usize,
    seed: u64,
    cfg: &ToleranceConfig,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new(
        "invertibility-preservation",
        "c is invertible iff E(z₁,…,zₙ) ∈ G_A implies F(z₁,…,zₙ) ∈ G_A",
        e.shape().block_dims(),
        e.k(),
        seed,
        *cfg,
    );
    report.n = Some(e.n());
    let c = match factorize_pair(e, f, cfg, &FactorizeOptions::with_seed(seed))? {
        Factorization::Factorized(r) => r.c,
        Factorization::PreservationViolated(v) => {
            report.note(
                "F does not vanish on the kernel of E; the invertibility statement does not apply",
            );
            report.fail(
                0,
                "kernel preservation hypothesis",
                -v.residual,
                ReplayCase::KernelViolation {
                    e: e.clone(),
                    f: f.clone(),
                    args: v.args,
                },
            );
            return Ok(report);
        }
    };
    let c_invertible = c.is_invertible(cfg.sing_tol);
    report.set_metric("c_invertible", if c_invertible { 1.0 } else { 0.0 });
    report.set_metric("c_min_singular", c.min_singular_value().1);
    let (shape, k, n) = (e.shape().clone(), e.k(), e.n());
    let mut sampled = 0usize;
    let mut preserved = 0usize;
    let mut loss: Option<Vec<ModuleVector>> = None;
    for trial in 0..trials {
        let mut rng = trial_rng(seed, STREAM_INVERTIBLE, trial as u64);
        let args: Vec<ModuleVector> = if trial % 2 == 0 {
            vec![ModuleVector::random(&shape, k, &mut rng); n]
        } else {
            (0..n)
                .map(|_| ModuleVector::random(&shape, k, &mut rng))
                .collect()
        };
        let ev = e.eval(&args)?;
        if !ev.is_invertible(cfg.sing_tol) {
            continue;
        }
        sampled += 1;
        if f.eval(&args)?.is_invertible(cfg.sing_tol) {
            preserved += 1;
        } else if loss.is_none() {
            loss = Some(args);
        }
    }
    report.trials = sampled;
    report.set_metric("invertible_e_values", sampled as f64);
    report.set_metric("invertible_f_values", preserved as f64);
    let all_preserved = preserved == sampled;
    if let Some(args) = loss {
        report.witness(
            "invertible E-value with non-invertible F-value",
            ReplayCase::InvertibilityLoss {
                e: e.clone(),
                f: f.clone(),
                args,
            },
        );
    }
    if c_invertible != all_preserved {
        report.fail(
            0,
            "invertibility of c disagrees with sampled preservation",
            -1.0,
            ReplayCase::Summary {
                description: format!(
                    "c invertible: {c_invertible}; preserved {preserved} of {sampled} invertible E-values"
                ),
            },
        );
    }
    Ok(report)
}

/// Given a complex-linear `T` with `|Tx| = γ|x|`, check `⟨Tx, Ty⟩ = γ²⟨x, y⟩` through the
/// four-modulus polarization path, and measure how far `T` is from being `A`-linear.
pub fn scaled_isometry_check(
    map: &MapFixture,
    gamma: f64,
    trials: usize,
    seed: u64,
    cfg: &ToleranceConfig,
) -> Result<VerificationReport> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::Domain(format!("γ must be positive, got {gamma}")));
    }
    let t = map.as_map();
    let (shape, k) = (t.shape().clone(), t.in_k());
    let mut report = VerificationReport::new(
        "scaled-isometry",
        "a linear T with |Tx| = γ|x| satisfies ⟨Tx, Ty⟩ = γ²⟨x, y⟩",
        shape.block_dims(),
        k,
        seed,
        *cfg,
    );
    report.set_metric("max_modulus_residual", 0.0);
    report.set_metric("max_polarization_error", 0.0);
    report.set_metric("max_a_linearity_residual", 0.0);
    let g2 = Complex64::new(gamma * gamma, 0.0);
    let mut hypothesis_ok = true;
    for trial in 0..trials {
        let mut rng = trial_rng(seed, STREAM_ISOMETRY, trial as u64);
        let x = ModuleVector::random(&shape, k, &mut rng);
        let tx = t.apply(&x)?;
        let lhs = tx.squared_modulus().sqrt_clamped();
        let rhs = x.squared_modulus().sqrt_clamped().scale_real(gamma);
        let r = (&lhs - &rhs).norm() / (1.0 + gamma * x.norm());
        report.max_metric("max_modulus_residual", r);
        if r > cfg.eq_tol {
            hypothesis_ok = false;
            report.fail(
                trial,
                "hypothesis |Tx| = γ|x|",
                cfg.eq_tol - r,
                ReplayCase::ModulusHypothesis {
                    map: map.clone(),
                    gamma,
                    x,
                },
            );
            break;
        }
    }
    if !hypothesis_ok {
        report.note("hypothesis failed; the polarization check was skipped");
        return Ok(report);
    }
    for trial in 0..trials {
        report.trials += 1;
        let mut rng = trial_rng(seed, STREAM_ISOMETRY ^ 0x100, trial as u64);
        let x = ModuleVector::random(&shape, k, &mut rng);
        let y = ModuleVector::random(&shape, k, &mut rng);
        let polar = crate::module::polarization_gram(t, &x, &y)?;
        let expected = x.inner_product(&y)?.scale(g2);
        let err = (&polar - &expected).norm() / (gamma * gamma * x.norm() * y.norm());
        report.max_metric("max_polarization_error", err);
        if err > 1e-8 {
            report.fail(
                trial,
                "⟨Tx, Ty⟩ = γ²⟨x, y⟩",
                1e-8 - err,
                ReplayCase::PolarizationMismatch {
                    map: map.clone(),
                    gamma,
                    x: x.clone(),
                    y: y.clone(),
                },
            );
        }
        let a = AlgebraElement::random(&shape, &mut rng);
        let lin = t
            .apply(&x.right_action(&a)?)?
            .try_sub(&t.apply(&x)?.right_action(&a)?)?
            .norm()
            / (gamma * x.norm() * a.norm());
        report.max_metric("max_a_linearity_residual", lin);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CMatrix, ZERO};
    use crate::module::CLinearMap;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn shape(d: &[usize]) -> AlgebraShape {
        AlgebraShape::new(d.to_vec()).unwrap()
    }

    fn diag(values: &[f64]) -> AlgebraElement {
        AlgebraElement::from_diagonal_values(
            &values
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect::<Vec<_>>(),
        )
    }

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn gram_form_is_the_inner_product() {
        let s = shape(&[2]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = MultiForm::gram(&s, 2);
        let x = ModuleVector::random(&s, 2, &mut rng);
        let y = ModuleVector::random(&s, 2, &mut rng);
        assert!(e
            .eval(&[x.clone(), y.clone()])
            .unwrap()
            .approx_eq(&x.inner_product(&y).unwrap(), 1e-14));
        let zero = ModuleVector::zeros(&s, 2);
        assert_eq!(e.eval(&[x, zero]).unwrap().norm(), 0.0);
    }

    #[test]
    fn gram_form_on_example_data() {
        let s = shape(&[2]);
        let x = ModuleVector::single(AlgebraElement::identity(&s));
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        let e11 = AlgebraElement::from_matrix(m).unwrap();
        let y = ModuleVector::single(e11.clone());
        assert_eq!(MultiForm::gram(&s, 1).eval(&[x, y]).unwrap(), e11);
    }

    /// Naive triple loop over indices with explicit conjugation of slots 1 and 3.
    #[test]
    fn arity_three_matches_naive_sum() {
        let s = shape(&[1, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = MultiForm::random(&s, 2, 3, &mut rng).unwrap();
        let args: Vec<_> = (0..3)
            .map(|_| ModuleVector::random(&s, 2, &mut rng))
            .collect();
        let got = f.eval(&args).unwrap();
        for b in 0..2 {
            let mut sum = ZERO;
            for i in 0..2 {
                for j in 0..2 {
                    for l in 0..2 {
                        let c = f.coeff(&[i, j, l]).block(b)[(0, 0)];
                        let x1 = args[0].entry(i).block(b)[(0, 0)].conj();
                        let x2 = args[1].entry(j).block(b)[(0, 0)];
                        let x3 = args[2].entry(l).block(b)[(0, 0)].conj();
                        sum += x1 * x2 * x3 * c;
                    }
                }
            }
            assert!((got.block(b)[(0, 0)] - sum).norm() < 1e-13);
        }
    }

    #[test]
    fn slot_axioms_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (s, n) in [
            (shape(&[2]), 1),
            (shape(&[2, 1]), 2),
            (shape(&[1, 1]), 3),
            (shape(&[1, 1, 1]), 4),
        ] {
            let f = MultiForm::random(&s, 2, n, &mut rng).unwrap();
            for _ in 0..50 {
                let args: Vec<_> = (0..n)
                    .map(|_| ModuleVector::random(&s, 2, &mut rng))
                    .collect();
                let j = rng.random_range(0..n);
                let a = AlgebraElement::random(&s, &mut rng);
                let alpha = crate::linalg::random_complex(&mut rng);
                let extra = ModuleVector::random(&s, 2, &mut rng);
                let base = f.eval(&args).unwrap();
                let mut scaled = args.clone();
                scaled[j] = args[j].right_action(&a).unwrap().scale(alpha);
                let got = f.eval(&scaled).unwrap();
                let expected = if slot_is_conjugate(n, j) {
                    &a.adjoint() * &base.scale(alpha.conj())
                } else {
                    &base * &a.scale(alpha)
                };
                assert!(got.approx_eq(&expected, 1e-12), "n={n} slot {j}");
                let mut summed = args.clone();
                summed[j] = args[j].try_add(&extra).unwrap();
                let mut other = args.clone();
                other[j] = extra;
                let add = &base + &f.eval(&other).unwrap();
                assert!(f.eval(&summed).unwrap().approx_eq(&add, 1e-12));
            }
        }
    }

    #[test]
    fn arity_three_rejects_matrix_blocks() {
        let s = shape(&[2]);
        assert!(matches!(
            MultiForm::zero(&s, 1, 3),
            Err(Error::UnsupportedShape { .. })
        ));
    }

    #[test]
    fn gram_pair_from_maps_matches_direct_inner_products() {
        let s = shape(&[2, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = AModuleMap::random(&s, 3, 2, &mut rng);
        let u = AModuleMap::random(&s, 3, 2, &mut rng);
        let (e, f) = gram_pair_from_maps(&t, &u).unwrap();
        assert_eq!(e, MultiForm::gram(&s, 2));
        for _ in 0..50 {
            let x = ModuleVector::random(&s, 2, &mut rng);
            let y = ModuleVector::random(&s, 2, &mut rng);
            let direct = t
                .apply(&x)
                .unwrap()
                .inner_product(&u.apply(&y).unwrap())
                .unwrap();
            assert!(f.eval(&[x, y]).unwrap().approx_eq(&direct, 1e-12));
        }
        let g = AModuleMap::scaled_identity(&s, 2, 2.0);
        let (e, f) = gram_pair_from_maps(&g, &g).unwrap();
        let four = AlgebraElement::scalar(&s, Complex64::new(4.0, 0.0));
        assert_eq!(f, e.left_multiply(&four).unwrap());
    }

    #[test]
    fn strong_witness_search() {
        let s = shape(&[1]);
        let w = find_strong_witness(&MultiForm::gram(&s, 1), 10, 0, &cfg()).unwrap();
        assert!((w.value.block(0)[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let zero = MultiForm::zero(&s, 2, 2).unwrap();
        assert_eq!(
            find_strong_witness(&zero, 10, 0, &cfg()),
            Err(Error::NotStrong { budget: 10 })
        );
        // ⟨(1,1),(1,1)⟩ = 2·1 in M₂, so the all-ones start already succeeds.
        let s2 = shape(&[2]);
        let w = find_strong_witness(&MultiForm::gram(&s2, 2), 10, 0, &cfg()).unwrap();
        assert!((w.min_singular - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bound_estimates() {
        let s = shape(&[1]);
        assert_eq!(
            is_bounded_estimate(&MultiForm::zero(&s, 1, 2).unwrap(), 20, 0),
            0.0
        );
        let e = MultiForm::gram(&s, 1);
        let m = is_bounded_estimate(&e, 200, 0);
        assert!((0.9..=1.0 + 1e-8).contains(&m), "{m}");
        let c = AlgebraElement::scalar(&s, Complex64::new(3.0, -1.0));
        let f = e.left_multiply(&c).unwrap();
        assert!(is_bounded_estimate(&f, 200, 0) <= c.norm() * m + 1e-12);
    }

    #[test]
    fn kernel_pairs_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for s in [shape(&[1, 1, 1]), shape(&[2])] {
            let e = MultiForm::random(&s, 2, 2, &mut rng).unwrap();
            for _ in 0..20 {
                let z = ModuleVector::random(&s, 2, &mut rng);
                let y = ModuleVector::random(&s, 2, &mut rng);
                let (r, l) = kernel_sample(&e, &z, &y, &cfg()).unwrap();
                let scale = e.coefficient_bound() * z.norm() * (z.norm() + y.norm());
                assert!(e.eval(&[z.clone(), r]).unwrap().norm() <= 1e-10 * scale);
                assert!(e.eval(&[l, z.clone()]).unwrap().norm() <= 1e-10 * scale);
            }
        }
        let s = shape(&[1]);
        let e = MultiForm::gram(&s, 2);
        let z = ModuleVector::new(vec![
            AlgebraElement::identity(&s),
            AlgebraElement::zeros(&s),
        ])
        .unwrap();
        let y = ModuleVector::new(vec![
            AlgebraElement::zeros(&s),
            AlgebraElement::identity(&s),
        ])
        .unwrap();
        let (r, l) = kernel_sample(&e, &z, &y, &cfg()).unwrap();
        assert_eq!((r, l), (y.clone(), y));
    }

    #[test]
    fn factorization_recovers_constructed_constant() {
        let s = shape(&[1, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let e = MultiForm::random(&s, 2, 2, &mut rng).unwrap();
        let c = diag(&[2.0, 3.0]);
        let f = e.left_multiply(&c).unwrap();
        let out = factorize_pair(&e, &f, &cfg(), &FactorizeOptions::default()).unwrap();
        let r = out.result().expect("factorized");
        assert!(r.c.approx_eq(&c, 1e-9));
        assert!(r.h_variation <= 1e-9);
        assert!(r.beta > 0.0);
        let zero = MultiForm::zero(&s, 2, 2).unwrap();
        let r = factorize_pair(&e, &zero, &cfg(), &FactorizeOptions::default()).unwrap();
        assert_eq!(r.result().unwrap().c.norm(), 0.0);
    }

    #[test]
    fn unitary_gram_pair_factorizes_with_unit_constant() {
        let s = shape(&[1, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = AModuleMap::random_unitary(&s, 2, &mut rng);
        let (e, f) = gram_pair_from_maps(&u, &u).unwrap();
        let r = factorize_pair(&e, &f, &cfg(), &FactorizeOptions::default()).unwrap();
        assert!(r
            .result()
            .unwrap()
            .c
            .approx_eq(&AlgebraElement::identity(&s), 1e-10));
    }

    #[test]
    fn nonabelian_arity_two_is_unsupported_by_default() {
        let s = shape(&[2]);
        let e = MultiForm::gram(&s, 1);
        let err = factorize_pair(&e, &e, &cfg(), &FactorizeOptions::default()).unwrap_err();
        assert!(matches!(err, Error::UnsupportedShape { .. }));
        let opts = FactorizeOptions {
            allow_nonabelian: true,
            ..Default::default()
        };
        assert!(factorize_pair(&e, &e, &cfg(), &opts)
            .unwrap()
            .result()
            .is_some());
    }

    #[test]
    fn linear_functionals_factorize_over_matrices() {
        let s = shape(&[2]);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let e = MultiForm::random(&s, 2, 1, &mut rng).unwrap();
        let c = AlgebraElement::random(&s, &mut rng);
        let f = e.left_multiply(&c).unwrap();
        let r = factorize_pair(&e, &f, &cfg(), &FactorizeOptions::default()).unwrap();
        assert!(r.result().unwrap().c.approx_eq(&c, 1e-9));
    }

    /// `F(x, y) = x₂* y₁` vanishes off the kernel of the Gram form, e.g. at x = (1, 1), y = (1, −1).
    #[test]
    fn swapped_gram_is_not_preserved() {
        let s = shape(&[1]);
        let e = MultiForm::gram(&s, 2);
        let f = MultiForm::from_fn(&s, 2, 2, |idx| {
            if idx == [1, 0] {
                AlgebraElement::identity(&s)
            } else {
                AlgebraElement::zeros(&s)
            }
        })
        .unwrap();
        let one = AlgebraElement::identity(&s);
        let x = ModuleVector::new(vec![one.clone(), one.clone()]).unwrap();
        let y = ModuleVector::new(vec![one.clone(), -&one]).unwrap();
        assert_eq!(e.eval(&[x.clone(), y.clone()]).unwrap().norm(), 0.0);
        assert_eq!(f.eval(&[x, y]).unwrap().norm(), 1.0);
        let report = preservation_check(&e, &f, 50, 1, &cfg()).unwrap();
        assert!(!report.passed);
        let ReplayCase::KernelViolation { args, .. } = &report.failures[0].case else {
            panic!()
        };
        assert!(e.eval(args).unwrap().norm() < 1e-10 * tuple_scale(args));
        let out = factorize_pair(&e, &f, &cfg(), &FactorizeOptions::default()).unwrap();
        assert!(matches!(
            out,
            Factorization::PreservationViolated(PreservationViolation {
                in_kernel: true,
                ..
            })
        ));
        let ok = preservation_check(
            &e,
            &e.left_multiply(&AlgebraElement::identity(&s).scale_real(2.0))
                .unwrap(),
            50,
            1,
            &cfg(),
        )
        .unwrap();
        assert!(ok.passed);
        assert!(ok.metric("max_kernel_f").unwrap() <= 1e-9);
    }

    #[test]
    fn slicing_the_last_slot_agrees_with_evaluation() {
        let s = shape(&[1, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = MultiForm::random(&s, 2, 3, &mut rng).unwrap();
        let b = ModuleVector::random(&s, 2, &mut rng);
        let sliced = f.slice_last(&b).unwrap();
        let x = ModuleVector::random(&s, 2, &mut rng);
        let y = ModuleVector::random(&s, 2, &mut rng);
        let direct = f.eval(&[x.clone(), y.clone(), b]).unwrap();
        assert!(sliced.eval(&[x, y]).unwrap().approx_eq(&direct, 1e-12));
        assert!(MultiForm::gram(&s, 2)
            .slice_last(&ModuleVector::zeros(&s, 2))
            .is_err());
    }

    #[test]
    fn invertibility_preservation_tracks_c() {
        let s = shape(&[1, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let e = MultiForm::random(&s, 2, 2, &mut rng).unwrap();
        let good = invertibility_preservation(
            &e,
            &e.left_multiply(&diag(&[2.0, 3.0])).unwrap(),
            100,
            3,
            &cfg(),
        )
        .unwrap();
        assert!(good.passed);
        assert_eq!(
            good.metric("invertible_e_values"),
            good.metric("invertible_f_values")
        );
        let bad = invertibility_preservation(
            &e,
            &e.left_multiply(&diag(&[1.0, 0.0])).unwrap(),
            100,
            3,
            &cfg(),
        )
        .unwrap();
        assert!(bad.passed);
        assert_eq!(bad.metric("c_invertible"), Some(0.0));
        assert!(matches!(
            bad.witnesses[0].case,
            ReplayCase::InvertibilityLoss { .. }
        ));
    }

    #[test]
    fn scaled_isometries() {
        let s = shape(&[2]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let id = MapFixture::ALinear(AModuleMap::identity(&s, 2));
        let r = scaled_isometry_check(&id, 1.0, 20, 0, &cfg()).unwrap();
        assert!(r.passed);
        assert_eq!(r.metric("max_a_linearity_residual"), Some(0.0));
        let u = MapFixture::ALinear(
            AModuleMap::random_unitary(&s, 2, &mut rng).scale(Complex64::new(2.0, 0.0)),
        );
        let r = scaled_isometry_check(&u, 2.0, 20, 0, &cfg()).unwrap();
        assert!(r.passed, "{:?}", r.metrics);
        let dense = MapFixture::Dense(CLinearMap::random(&s, 2, 2, &mut rng));
        let r = scaled_isometry_check(&dense, 1.0, 20, 0, &cfg()).unwrap();
        assert!(!r.passed);
        assert!(matches!(
            r.failures[0].case,
            ReplayCase::ModulusHypothesis { .. }
        ));
    }

    #[test]
    fn json_round_trip_skips_zero_coefficients() {
        let s = shape(&[1, 1]);
        let e = MultiForm::gram(&s, 2);
        let text = serde_json::to_string(&e).unwrap();
        assert!(text.contains("\"0,0\"") && !text.contains("\"0,1\""));
        let back: MultiForm = serde_json::from_str(&text).unwrap();
        assert_eq!(back, e);
    }
}
