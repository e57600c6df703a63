//! Decision procedures for inner-product, Birkhoff–James and strong Birkhoff–James
//! orthogonality, and for the modulus and norm inequalities that characterize `⟨x,y⟩ = 0`.
//!
//! Every procedure works on the reduced data `⟨x,x⟩`, `⟨x,y⟩`, `⟨y,y⟩`: for any `a` and `λ`
//! the Gram elements of `x + λy`, `x + ya`, `xa` and `xa + y` are polynomials in these three
//! algebra elements, so searches never touch the `k`-tuples themselves.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, AlgebraShape, State};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, ZERO};
use crate::module::{ModuleVector, ToleranceConfig};
use crate::optim::{golden_section, nelder_mead, NelderMeadOptions};
use crate::report::{ReplayCase, VerificationReport};
use crate::sampling;

/// Which relation or inequality family a verdict decides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `⟨x, y⟩ = 0`.
    InnerProduct,
    /// `‖x + λy‖ ≥ ‖x‖` for every complex `λ`.
    BirkhoffJames,
    /// `‖x + ya‖ ≥ ‖x‖` for every algebra element `a`.
    StrongBirkhoffJames,
    /// `|xa + y|² ≥ |xa|²` for every `a`.
    SquaredModulus,
    /// `|xa + y| ≥ |xa|` for every `a`.
    Modulus,
    /// `‖xa + y‖ ≥ ‖xa‖` for every `a`.
    ReversedAction,
}

/// Evidence attached to a verdict: the minimizing scalar, algebra element or state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Scalar { lambda: Complex64 },
    Element { a: AlgebraElement },
    State { state: State },
}

/// Outcome of a decision procedure. `holds == (margin >= -tolerance)` always.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityVerdict {
    pub relation: Relation,
    pub holds: bool,
    /// Signed slack at the deciding point.
    pub margin: f64,
    /// The optimized quantity (minimum norm, infimum, or `‖⟨x,y⟩‖`).
    pub value: f64,
    pub tolerance: f64,
    pub witness: Option<Witness>,
}

impl OrthogonalityVerdict {
    fn new(
        relation: Relation,
        margin: f64,
        value: f64,
        tolerance: f64,
        witness: Option<Witness>,
    ) -> Self {
        Self {
            relation,
            holds: margin >= -tolerance,
            margin,
            value,
            tolerance,
            witness,
        }
    }
}

/// Search budget and reproducibility controls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub seed: u64,
    /// Random starts after the structured and zero starts.
    pub random_starts: usize,
    /// Nelder–Mead evaluations per unit of search dimension.
    pub evals_per_dim: usize,
    /// Angles in the numerical-range sweep.
    pub theta_points: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            seed: 42,
            random_starts: 8,
            evals_per_dim: 40,
            theta_points: 720,
        }
    }
}

/// Largest eigenvalue of a positive element, i.e. its norm, clamped at zero.
fn psd_norm(m: &AlgebraElement) -> f64 {
    m.max_eigenvalue().max(0.0)
}

/// `⟨x,x⟩`, `⟨x,y⟩`, `⟨y,y⟩` and the two norms.
#[derive(Clone, Debug)]
struct PairGram {
    p: AlgebraElement,
    g: AlgebraElement,
    q: AlgebraElement,
    nx: f64,
    ny: f64,
}

impl PairGram {
    fn new(x: &ModuleVector, y: &ModuleVector) -> Result<Self> {
        x.check_compatible(y)?;
        let p = x.squared_modulus();
        let g = x.inner_product(y)?;
        let q = y.squared_modulus();
        let nx = psd_norm(&p).sqrt();
        let ny = psd_norm(&q).sqrt();
        Ok(Self { p, g, q, nx, ny })
    }

    fn shape(&self) -> &AlgebraShape {
        self.p.shape()
    }

    /// `⟨x + λy, x + λy⟩`.
    fn gram_scalar(&self, lambda: Complex64) -> AlgebraElement {
        let cross = self.g.scale(lambda);
        &(&self.p + &(&cross + &cross.adjoint())) + &self.q.scale_real(lambda.norm_sqr())
    }

    /// `⟨x + ya, x + ya⟩ = ⟨x,x⟩ + ⟨x,y⟩a + a*⟨y,x⟩ + a*⟨y,y⟩a`.
    fn gram_right(&self, a: &AlgebraElement) -> AlgebraElement {
        let ga = &self.g * a;
        let a_star = a.adjoint();
        &(&self.p + &(&ga + &ga.adjoint())) + &(&a_star * &(&self.q * a))
    }

    /// `(⟨xa, xa⟩, ⟨xa + y, xa + y⟩ − ⟨xa, xa⟩)`.
    fn gram_reversed(&self, a: &AlgebraElement) -> (AlgebraElement, AlgebraElement) {
        let a_star = a.adjoint();
        let m0 = &a_star * &(&self.p * a);
        let cross = &a_star * &self.g;
        let diff = &(&cross + &cross.adjoint()) + &self.q;
        (m0, diff)
    }
}

/// `x ⊥ y`: `‖⟨x,y⟩‖ ≤ eq_tol·(1 + ‖x‖‖y‖)`.
pub fn ip_orthogonal(
    x: &ModuleVector,
    y: &ModuleVector,
    cfg: &ToleranceConfig,
) -> Result<OrthogonalityVerdict> {
    let gram = PairGram::new(x, y)?;
    let size = gram.g.norm();
    let threshold = cfg.eq_tol * (1.0 + gram.nx * gram.ny);
    Ok(OrthogonalityVerdict::new(
        Relation::InnerProduct,
        threshold - size,
        size,
        0.0,
        None,
    ))
}

/// `x ⊥_B y` decided by minimizing `λ ↦ ‖x + λy‖` over the disc `|λ| ≤ 2‖x‖/‖y‖`.
pub fn bj_orthogonal_minimize(
    x: &ModuleVector,
    y: &ModuleVector,
    cfg: &ToleranceConfig,
) -> Result<OrthogonalityVerdict> {
    let gram = PairGram::new(x, y)?;
    Ok(bj_minimize_gram(&gram, cfg))
}

fn bj_minimize_gram(gram: &PairGram, cfg: &ToleranceConfig) -> OrthogonalityVerdict {
    let (nx, ny) = (gram.nx, gram.ny);
    if ny == 0.0 || nx == 0.0 {
        return OrthogonalityVerdict::new(
            Relation::BirkhoffJames,
            0.0,
            nx,
            cfg.opt_tol,
            Some(Witness::Scalar { lambda: ZERO }),
        );
    }
    let (lambda, mu) = bj_argmin(gram);
    OrthogonalityVerdict::new(
        Relation::BirkhoffJames,
        mu - nx,
        mu,
        cfg.opt_tol,
        Some(Witness::Scalar { lambda }),
    )
}

/// Minimizer and minimum of `‖x + λy‖`: coarse 21×21 grid then Nelder–Mead.
fn bj_argmin(gram: &PairGram) -> (Complex64, f64) {
    let radius = 2.0 * gram.nx / gram.ny;
    let norm_at = |lambda: Complex64| psd_norm(&gram.gram_scalar(lambda)).sqrt();
    let steps = 21;
    let mut best = (ZERO, norm_at(ZERO));
    for i in 0..steps {
        for j in 0..steps {
            let re = -radius + 2.0 * radius * i as f64 / (steps - 1) as f64;
            let im = -radius + 2.0 * radius * j as f64 / (steps - 1) as f64;
            let lambda = Complex64::new(re, im);
            if lambda.norm() > radius {
                continue;
            }
            let v = norm_at(lambda);
            if v < best.1 {
                best = (lambda, v);
            }
        }
    }
    let opts = NelderMeadOptions {
        initial_step: radius / (steps - 1) as f64,
        max_evaluations: 600,
        f_tol: 1e-15,
        x_tol: 1e-12 * radius,
        restarts: 2,
    };
    let m = nelder_mead(
        &mut |v: &[f64]| norm_at(Complex64::new(v[0], v[1])),
        &[best.0.re, best.0.im],
        &opts,
    );
    if m.value < best.1 {
        best = (Complex64::new(m.x[0], m.x[1]), m.value);
    }
    best
}

/// `x ⊥_B y` decided through the state criterion: some state `φ` with
/// `φ(⟨x,x⟩) = ‖x‖²` and `φ(⟨x,y⟩) = 0`.
///
/// The norming states live on the top eigenspace of `⟨x,x⟩`, so the criterion becomes
/// `0 ∈ W(C)` for the compression `C` of `⟨x,y⟩` to that eigenspace. Membership is decided
/// by sweeping the support function `θ ↦ λ_max(Re(e^{iθ}C))`. On success a state made of
/// at most two vector states is reconstructed; on failure the witness is a `λ` along the
/// separating direction.
pub fn bj_orthogonal_witness(
    x: &ModuleVector,
    y: &ModuleVector,
    cfg: &ToleranceConfig,
    opts: &SearchOptions,
) -> Result<OrthogonalityVerdict> {
    let gram = PairGram::new(x, y)?;
    if gram.nx == 0.0 {
        return Err(Error::Domain("the state criterion needs x ≠ 0".into()));
    }
    let shape = gram.shape().clone();
    let top = gram.nx * gram.nx;
    let cutoff = top * (1.0 - cfg.psd_tol);

    // Orthonormal bases of the top eigenspace, block by block.
    let mut bases: Vec<Option<CMatrix>> = Vec::with_capacity(shape.num_blocks());
    for blk in gram.p.blocks() {
        let (vals, vecs) = linalg::hermitian_eigen(blk);
        let cols: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] >= cutoff).collect();
        if cols.is_empty() {
            bases.push(None);
        } else {
            let v = CMatrix::from_fn(blk.nrows(), cols.len(), |r, c| vecs[(r, cols[c])]);
            bases.push(Some(v));
        }
    }
    let tolerance = cfg.psd_tol * gram.nx * gram.ny.max(f64::MIN_POSITIVE);

    if gram.ny == 0.0 {
        let parts = first_top_vector(&bases);
        let state = State::from_block_vectors(&shape, &[(1.0, parts)])?;
        return Ok(OrthogonalityVerdict::new(
            Relation::BirkhoffJames,
            0.0,
            0.0,
            tolerance,
            Some(Witness::State { state }),
        ));
    }

    let compressed = Compression::new(&gram.g, &bases);
    let sweep = compressed.sweep(opts.theta_points.max(8));
    let (theta_star, h_star) = sweep.minimum;

    if h_star >= -tolerance {
        let state = compressed.reconstruct_state(&shape, &sweep, &gram, gram.nx * gram.ny);
        return Ok(OrthogonalityVerdict::new(
            Relation::BirkhoffJames,
            h_star,
            h_star,
            tolerance,
            state.map(|state| Witness::State { state }),
        ));
    }

    // Descent direction: ‖x + t e^{iθ*} y‖ decreases for small t > 0.
    let direction = Complex64::from_polar(1.0, theta_star);
    let radius = 2.0 * gram.nx / gram.ny;
    let (t, _) = golden_section(
        &mut |t| psd_norm(&gram.gram_scalar(direction * t)).sqrt(),
        0.0,
        radius,
        1e-12 * radius,
        200,
    );
    Ok(OrthogonalityVerdict::new(
        Relation::BirkhoffJames,
        h_star,
        h_star,
        tolerance,
        Some(Witness::Scalar {
            lambda: direction * t,
        }),
    ))
}

fn first_top_vector(bases: &[Option<CMatrix>]) -> Vec<Option<CVector>> {
    let mut done = false;
    bases
        .iter()
        .map(|b| match b {
            Some(v) if !done => {
                done = true;
                Some(v.column(v.ncols() - 1).into_owned())
            }
            _ => None,
        })
        .collect()
}

/// `⟨x,y⟩` compressed to the top eigenspace of `⟨x,x⟩`, assembled as one block-diagonal matrix.
struct Compression {
    matrix: CMatrix,
    /// `(block, offset, width, basis)` for each block meeting the eigenspace.
    pieces: Vec<(usize, usize, usize, CMatrix)>,
}

struct Sweep {
    minimum: (f64, f64),
    /// Exposed points: top eigenvectors of `Re(e^{iθ}C)` at every sampled angle.
    exposed: Vec<CVector>,
}

impl Compression {
    fn new(g: &AlgebraElement, bases: &[Option<CMatrix>]) -> Self {
        let mut pieces = Vec::new();
        let mut offset = 0;
        for (b, basis) in bases.iter().enumerate() {
            if let Some(v) = basis {
                pieces.push((b, offset, v.ncols(), v.clone()));
                offset += v.ncols();
            }
        }
        let mut matrix = CMatrix::zeros(offset, offset);
        for (b, off, w, v) in &pieces {
            let c = v.adjoint() * g.block(*b) * v;
            matrix.view_mut((*off, *off), (*w, *w)).copy_from(&c);
        }
        Self { matrix, pieces }
    }

    /// `λ_max(Re(e^{iθ}C))`.
    fn support(&self, theta: f64) -> f64 {
        let rotated = &self.matrix * Complex64::from_polar(1.0, theta);
        let mut best = f64::NEG_INFINITY;
        for (_, off, w, _) in &self.pieces {
            let sub = rotated.view((*off, *off), (*w, *w)).into_owned();
            best = best.max(linalg::max_hermitian_eigenvalue(&sub));
        }
        best
    }

    fn sweep(&self, points: usize) -> Sweep {
        let step = 2.0 * PI / points as f64;
        let mut minimum = (0.0, f64::INFINITY);
        let mut exposed = Vec::with_capacity(points);
        for j in 0..points {
            let theta = j as f64 * step;
            let rotated = &self.matrix * Complex64::from_polar(1.0, theta);
            let (vals, vecs) = linalg::hermitian_eigen(&rotated);
            let h = *vals.last().expect("non-empty compression");
            exposed.push(vecs.column(vecs.ncols() - 1).into_owned());
            if h < minimum.1 {
                minimum = (theta, h);
            }
        }
        let (theta, _) = golden_section(
            &mut |t| self.support(t),
            minimum.0 - step,
            minimum.0 + step,
            1e-12,
            100,
        );
        let refined = self.support(theta);
        if refined < minimum.1 {
            minimum = (theta, refined);
        }
        Sweep { minimum, exposed }
    }

    /// Lift a vector on the compressed space to per-block components.
    fn lift(&self, v: &CVector, num_blocks: usize) -> Vec<Option<CVector>> {
        let mut parts = vec![None; num_blocks];
        for (b, off, w, basis) in &self.pieces {
            let piece = v.rows(*off, *w).into_owned();
            if piece.norm_squared() > 0.0 {
                parts[*b] = Some(basis * piece);
            }
        }
        parts
    }

    /// A state on the top eigenspace annihilating `⟨x,y⟩`, from at most two vector states.
    fn reconstruct_state(
        &self,
        shape: &AlgebraShape,
        sweep: &Sweep,
        gram: &PairGram,
        scale: f64,
    ) -> Option<State> {
        let c = &self.matrix;
        let value = |v: &CVector| (v.adjoint() * c * v)[(0, 0)];
        let accept = |state: &State| -> bool {
            let on_g = state
                .apply(&gram.g)
                .map(|z| z.norm())
                .unwrap_or(f64::INFINITY);
            let on_p = state
                .apply(&gram.p)
                .map(|z| (z.re - gram.nx * gram.nx).abs())
                .unwrap_or(f64::INFINITY);
            on_g <= 1e-8 * scale && on_p <= 1e-8 * gram.nx * gram.nx
        };

        let mut candidates: Vec<(f64, &CVector)> =
            sweep.exposed.iter().map(|u| (value(u).norm(), u)).collect();
        candidates.sort_by(|a, b| b.0.total_cmp(&a.0));

        // A vector state already on the origin.
        if let Some((_, u)) = candidates.iter().min_by(|a, b| a.0.total_cmp(&b.0)) {
            if let Ok(state) =
                State::from_block_vectors(shape, &[(1.0, self.lift(u, shape.num_blocks()))])
            {
                if accept(&state) {
                    return Some(state);
                }
            }
        }

        let stride = (candidates.len() / 16).max(1);
        for (w_abs, u) in candidates.iter().step_by(stride).take(16) {
            if *w_abs == 0.0 {
                continue;
            }
            let w_u = value(u);
            let phase = w_u / w_u.norm();
            let d = c * phase.conj();
            let h = linalg::hermitian_part(&d);
            let k = (&d - d.adjoint()) * Complex64::new(0.0, -0.5);
            let Some(v) = real_axis_point(&h, &k) else {
                continue;
            };
            let w_v = (v.adjoint() * &d * &v)[(0, 0)];
            if w_v.re > 1e-12 * scale {
                continue;
            }
            let t = -w_v.re / (*w_abs - w_v.re);
            let terms = [
                (t, self.lift(u, shape.num_blocks())),
                (1.0 - t, self.lift(&v, shape.num_blocks())),
            ];
            let terms: Vec<_> = terms.into_iter().filter(|(w, _)| *w > 0.0).collect();
            if let Ok(state) = State::from_block_vectors(shape, &terms) {
                if accept(&state) {
                    return Some(state);
                }
            }
        }
        None
    }
}

/// Unit vector `v` with `v*Kv = 0` and `v*Hv` minimal, i.e. the leftmost point of
/// `W(H + iK)` on the real axis, via the concave dual `max_t λ_min(H + tK)`.
fn real_axis_point(h: &CMatrix, k: &CMatrix) -> Option<CVector> {
    let n = h.nrows();
    let scale = linalg::operator_norm(h)
        .max(linalg::operator_norm(k))
        .max(f64::MIN_POSITIVE);
    let k_norm = linalg::operator_norm(k);
    let lambda_min = |t: f64| linalg::min_hermitian_eigenvalue(&(h + k * Complex64::new(t, 0.0)));
    let t_star = if k_norm <= 1e-14 * scale {
        0.0
    } else {
        let bound = 1e6 * scale / k_norm;
        golden_section(&mut |t| -lambda_min(t), -bound, bound, 1e-13 * bound, 300).0
    };
    let m = h + k * Complex64::new(t_star, 0.0);
    let (vals, vecs) = linalg::hermitian_eigen(&m);
    let cluster_tol = 1e-7 * (linalg::operator_norm(&m) + scale);
    let width = vals
        .iter()
        .take_while(|&&v| v <= vals[0] + cluster_tol)
        .count()
        .max(1);
    if width == 1 {
        return Some(vecs.column(0).into_owned());
    }
    let basis = vecs.columns(0, width).into_owned();
    let kc = basis.adjoint() * k * &basis;
    let (kappa, evecs) = linalg::hermitian_eigen(&kc);
    let lo = &basis * evecs.column(0);
    let hi = &basis * evecs.column(width - 1);
    let (k_lo, k_hi) = (kappa[0], kappa[width - 1]);
    if k_lo >= 0.0 {
        return Some(lo);
    }
    if k_hi <= 0.0 {
        return Some(hi);
    }
    let s = (-k_lo / k_hi).sqrt().atan();
    let v = lo * Complex64::new(s.cos(), 0.0) + hi * Complex64::new(s.sin(), 0.0);
    let norm = v.norm();
    (norm > 0.0 && n > 0).then(|| v / Complex64::new(norm, 0.0))
}

/// `x ⊥ˢ_B y` decided by minimizing `a ↦ ‖x + ya‖` over the real coordinates of `a`.
///
/// Starts are `a = 0`, the least-squares point `−⟨y,y⟩⁺⟨y,x⟩`, and `λ*·1` for the
/// Birkhoff–James minimizer `λ*`, so a "holds" here always implies a "holds" for `⊥_B`.
pub fn strong_bj_orthogonal(
    x: &ModuleVector,
    y: &ModuleVector,
    cfg: &ToleranceConfig,
    opts: &SearchOptions,
) -> Result<OrthogonalityVerdict> {
    let gram = PairGram::new(x, y)?;
    let (nx, ny) = (gram.nx, gram.ny);
    let shape = gram.shape().clone();
    if nx == 0.0 || ny == 0.0 {
        return Ok(OrthogonalityVerdict::new(
            Relation::StrongBirkhoffJames,
            0.0,
            nx,
            cfg.opt_tol,
            Some(Witness::Element {
                a: AlgebraElement::zeros(&shape),
            }),
        ));
    }
    let objective = |a: &AlgebraElement| psd_norm(&gram.gram_right(a)).sqrt();
    let (lambda, _) = bj_argmin(&gram);
    let least_squares = -&(&gram.q.pseudo_inverse(1e-12) * &gram.g.adjoint());
    let starts = vec![
        AlgebraElement::zeros(&shape),
        least_squares,
        AlgebraElement::scalar(&shape, lambda),
    ];
    let dim = shape.real_dim();
    let search = AlgebraSearch {
        shape: &shape,
        radius: f64::INFINITY,
        tie: 0.0,
        stop_below: None,
        max_evals: opts.evals_per_dim.max(1) * 5 * (dim + 1),
        base_step: 0.25 * nx / ny,
    };
    let best = search.run(starts, &objective);
    Ok(OrthogonalityVerdict::new(
        Relation::StrongBirkhoffJames,
        best.value - nx,
        best.value,
        cfg.opt_tol,
        Some(Witness::Element { a: best.a }),
    ))
}

/// Condition `|xa + y|² ≥ |xa|²` for all `a`; the infimum of `λ_min(a*⟨x,y⟩ + ⟨y,x⟩a + |y|²)`.
pub fn squared_modulus_condition(
    x: &ModuleVector,
    y: &ModuleVector,
    cfg: &ToleranceConfig,
    opts: &SearchOptions,
) -> Result<OrthogonalityVerdict> {
    let gram = PairGram::new(x, y)?;
    Ok(reversed_search(&gram, Relation::SquaredModulus, cfg, opts))
}

/// Condition `|xa + y| ≥ |xa|` for all `a`; the infimum of `λ_min(|xa + y| − |xa|)`.
pub fn modulus_condition(
    x: &ModuleVector,
    y: &ModuleVector,
    cfg: &ToleranceConfig,
    opts: &SearchOptions,
) -> Result<OrthogonalityVerdict> {
    let gram = PairGram::new(x, y)?;
    Ok(reversed_search(&gram, Relation::Modulus, cfg, opts))
}

/// Condition `‖xa + y‖ ≥ ‖xa‖` for all `a`; the infimum of `‖xa + y‖ − ‖xa‖`.
pub fn reversed_action_condition(
    x: &ModuleVector,
    y: &ModuleVector,
    cfg: &ToleranceConfig,
    opts: &SearchOptions,
) -> Result<OrthogonalityVerdict> {
    let gram = PairGram::new(x, y)?;
    Ok(reversed_search(&gram, Relation::ReversedAction, cfg, opts))
}

/// Decide any relation for the pair, dispatching on `relation`.
pub fn decide(
    relation: Relation,
    x: &ModuleVector,
    y: &ModuleVector,
    cfg: &ToleranceConfig,
    opts: &SearchOptions,
) -> Result<OrthogonalityVerdict> {
    match relation {
        Relation::InnerProduct => ip_orthogonal(x, y, cfg),
        Relation::BirkhoffJames => bj_orthogonal_minimize(x, y, cfg),
        Relation::StrongBirkhoffJames => strong_bj_orthogonal(x, y, cfg, opts),
        Relation::SquaredModulus => squared_modulus_condition(x, y, cfg, opts),
        Relation::Modulus => modulus_condition(x, y, cfg, opts),
        Relation::ReversedAction => reversed_action_condition(x, y, cfg, opts),
    }
}

/// Value of the inequality family at one point `a`, computed from the vectors directly.
/// Negative values are violations.
pub fn condition_value(
    relation: Relation,
    x: &ModuleVector,
    y: &ModuleVector,
    a: &AlgebraElement,
) -> Result<f64> {
    let xa = x.right_action(a)?;
    let xay = xa.try_add(y)?;
    Ok(match relation {
        Relation::SquaredModulus => {
            (&xay.squared_modulus() - &xa.squared_modulus()).min_eigenvalue()
        }
        Relation::Modulus => (&xay.squared_modulus().sqrt_clamped()
            - &xa.squared_modulus().sqrt_clamped())
            .min_eigenvalue(),
        Relation::ReversedAction => xay.norm() - xa.norm(),
        Relation::StrongBirkhoffJames => y.right_action(a)?.try_add(x)?.norm() - x.norm(),
        Relation::BirkhoffJames | Relation::InnerProduct => {
            return Err(Error::Domain(format!(
                "{relation:?} is not evaluated at an algebra element"
            )))
        }
    })
}

fn reversed_objective(gram: &PairGram, relation: Relation, a: &AlgebraElement) -> f64 {
    let (m0, diff) = gram.gram_reversed(a);
    match relation {
        Relation::SquaredModulus => diff.min_eigenvalue(),
        Relation::Modulus => {
            let m1 = &m0 + &diff;
            (&m1.sqrt_clamped() - &m0.sqrt_clamped()).min_eigenvalue()
        }
        Relation::ReversedAction => {
            let m1 = &m0 + &diff;
            psd_norm(&m1).sqrt() - psd_norm(&m0).sqrt()
        }
        _ => unreachable!("not a reversed-action family"),
    }
}

fn reversed_tolerance(gram: &PairGram, relation: Relation, cfg: &ToleranceConfig) -> f64 {
    match relation {
        Relation::SquaredModulus => cfg.psd_tol * (1.0 + gram.ny * gram.ny),
        Relation::Modulus => cfg.psd_tol * (1.0 + gram.ny),
        _ => cfg.opt_tol * (1.0 + gram.ny),
    }
}

fn reversed_search(
    gram: &PairGram,
    relation: Relation,
    cfg: &ToleranceConfig,
    opts: &SearchOptions,
) -> OrthogonalityVerdict {
    let shape = gram.shape().clone();
    let tolerance = reversed_tolerance(gram, relation, cfg);
    let zero = AlgebraElement::zeros(&shape);
    let objective = |a: &AlgebraElement| reversed_objective(gram, relation, a);
    if gram.ny == 0.0 || gram.nx == 0.0 {
        // y = 0 makes every family an identity; x = 0 leaves `|y|² ≥ 0`.
        let v = objective(&zero);
        return OrthogonalityVerdict::new(
            relation,
            v.min(0.0).max(-tolerance),
            v,
            tolerance,
            Some(Witness::Element { a: zero }),
        );
    }
    let ratio = gram.ny / gram.nx;
    let dim = shape.real_dim();
    let mut starts = vec![structured_start(gram, &objective), zero];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let spread = ratio / (shape.complex_dim() as f64).sqrt();
    for _ in 0..opts.random_starts {
        starts.push(AlgebraElement::random(&shape, &mut rng).scale_real(spread));
    }
    let search = AlgebraSearch {
        shape: &shape,
        radius: 1e4 * ratio,
        tie: tolerance,
        stop_below: Some(-tolerance),
        max_evals: opts.evals_per_dim.max(1) * (dim + 1),
        base_step: 0.25 * ratio,
    };
    let best = search.run(starts, &objective);
    OrthogonalityVerdict::new(
        relation,
        best.value,
        best.value,
        tolerance,
        Some(Witness::Element { a: best.a }),
    )
}

/// Best point among `a = λ̂⟨x,y⟩` on a polar grid of `λ̂`, and `a = ⟨x,y⟩/λ*` where `λ*`
/// minimizes `‖x⟨x,y⟩ + λy‖`.
fn structured_start(gram: &PairGram, objective: &dyn Fn(&AlgebraElement) -> f64) -> AlgebraElement {
    let shape = gram.shape();
    let g_norm = gram.g.norm();
    if g_norm == 0.0 {
        return AlgebraElement::zeros(shape);
    }
    let base = gram.ny / (gram.nx * g_norm);
    let mut best: Option<(AlgebraElement, f64)> = None;
    let mut consider = |a: AlgebraElement| {
        let v = objective(&a);
        if best.as_ref().is_none_or(|(_, b)| v < *b) {
            best = Some((a, v));
        }
    };
    for j in -8..=12 {
        let r = base * 10f64.powf(j as f64 / 4.0);
        for m in 0..8 {
            let lambda = Complex64::from_polar(r, m as f64 * PI / 4.0);
            consider(gram.g.scale(lambda));
        }
    }
    // ⟨x⟨x,y⟩, x⟨x,y⟩⟩ = G*PG and ⟨x⟨x,y⟩, y⟩ = G*G.
    let g_star = gram.g.adjoint();
    let derived = PairGram {
        p: &g_star * &(&gram.p * &gram.g),
        g: &g_star * &gram.g,
        q: gram.q.clone(),
        nx: 0.0,
        ny: gram.ny,
    };
    let derived = PairGram {
        nx: psd_norm(&derived.p).sqrt(),
        ..derived
    };
    if derived.nx > 0.0 {
        let (lambda, _) = bj_argmin(&derived);
        if lambda.norm() > 0.0 {
            consider(gram.g.scale(lambda.inv()));
        }
    }
    best.map(|(a, _)| a)
        .unwrap_or_else(|| AlgebraElement::zeros(shape))
}

/// Minimize `objective` over the algebra from the given starts, stopping at the first start
/// whose local minimum falls below `stop_below`.
pub(crate) fn minimize_over_algebra(
    shape: &AlgebraShape,
    starts: Vec<AlgebraElement>,
    objective: &dyn Fn(&AlgebraElement) -> f64,
    max_evals: usize,
    base_step: f64,
    stop_below: f64,
) -> (AlgebraElement, f64) {
    let search = AlgebraSearch {
        shape,
        radius: f64::INFINITY,
        tie: 0.0,
        stop_below: Some(stop_below),
        max_evals,
        base_step,
    };
    let best = search.run(starts, objective);
    (best.a, best.value)
}

struct Candidate {
    a: AlgebraElement,
    value: f64,
}

/// Multi-start Nelder–Mead over the real coordinates of an algebra element, restricted to
/// the Frobenius ball of the given radius by radial projection.
struct AlgebraSearch<'s> {
    shape: &'s AlgebraShape,
    radius: f64,
    /// NM results must beat their start by more than this to replace it.
    tie: f64,
    /// Stop after the first start that reaches below this value.
    stop_below: Option<f64>,
    max_evals: usize,
    base_step: f64,
}

impl AlgebraSearch<'_> {
    fn project(&self, a: AlgebraElement) -> AlgebraElement {
        let f = a.frobenius_norm();
        if f > self.radius {
            a.scale_real(self.radius / f)
        } else {
            a
        }
    }

    fn run(
        &self,
        starts: Vec<AlgebraElement>,
        objective: &dyn Fn(&AlgebraElement) -> f64,
    ) -> Candidate {
        let dim = self.shape.real_dim() as f64;
        let mut found: Vec<Candidate> = Vec::new();
        for start in starts {
            let start = self.project(start);
            let v0 = objective(&start);
            let coords = start.to_real_coords();
            let step = self
                .base_step
                .max(0.25 * start.frobenius_norm() / dim.sqrt());
            let opts = NelderMeadOptions {
                initial_step: step,
                max_evaluations: self.max_evals,
                f_tol: 1e-14,
                x_tol: 1e-12 * step,
                restarts: 1,
            };
            let m = nelder_mead(
                &mut |c: &[f64]| {
                    let a =
                        AlgebraElement::from_real_coords(self.shape, c).expect("coordinate count");
                    objective(&self.project(a))
                },
                &coords,
                &opts,
            );
            let candidate = if m.value < v0 - self.tie {
                let a = self.project(
                    AlgebraElement::from_real_coords(self.shape, &m.x).expect("coordinate count"),
                );
                let value = objective(&a);
                Candidate { a, value }
            } else {
                Candidate {
                    a: start,
                    value: v0,
                }
            };
            let stop = self.stop_below.is_some_and(|s| candidate.value < s);
            found.push(candidate);
            if stop {
                break;
            }
        }
        let best_value = found.iter().map(|c| c.value).fold(f64::INFINITY, f64::min);
        let violating = self.stop_below.is_some_and(|s| best_value < s);
        found
            .into_iter()
            .filter(|c| {
                c.value <= best_value + self.tie
                    && (!violating || self.stop_below.is_some_and(|s| c.value < s))
            })
            .min_by(|a, b| a.a.frobenius_norm().total_cmp(&b.a.frobenius_norm()))
            .expect("at least one start")
    }
}

/// Search for pairs with `x ⊥_B y` and `‖x + y‖ < ‖y‖`.
///
/// Over `ℂ` the relation is symmetric and no such pair exists; over any other algebra the
/// probe must find one whose gap is at least `0.1`, confirmed by both Birkhoff–James
/// procedures. Pairs come from [`sampling::bj_pair`] with `y` rescaled to
/// `‖y‖ = ‖x‖(1 + 3U)`, `U` uniform.
pub fn bj_symmetry_probe(
    shape: &AlgebraShape,
    k: usize,
    trials: usize,
    cfg: &ToleranceConfig,
    opts: &SearchOptions,
) -> Result<VerificationReport> {
    let complex_field = shape.is_complex_field();
    let mut report = VerificationReport::new(
        "bj-symmetry",
        "x ⊥_B y implies ‖x + y‖ ≥ ‖y‖ exactly when the algebra is ℂ",
        shape.block_dims(),
        k,
        opts.seed,
        *cfg,
    );
    report.note(if complex_field {
        "the algebra is isomorphic to ℂ: no counterexample may exist"
    } else {
        "the algebra is not isomorphic to ℂ: a counterexample must exist"
    });
    report.set_metric("counterexamples", 0.0);
    report.set_metric("min_gap", f64::INFINITY);
    for trial in 0..trials {
        report.trials += 1;
        let mut rng = sampling::trial_rng(opts.seed, 0xB5, trial as u64);
        let (x, y) = sampling::bj_pair(shape, k, &mut rng);
        let (nx, ny) = (x.norm(), y.norm());
        let y = if ny > 0.0 {
            let target = nx * (1.0 + 3.0 * rng.random::<f64>());
            y.scale(Complex64::new(target / ny, 0.0))
        } else {
            y
        };
        let gap = x.try_add(&y)?.norm() - y.norm();
        report.min_metric("min_gap", gap);
        let needed = if complex_field {
            -cfg.opt_tol * (1.0 + y.norm())
        } else {
            -0.1
        };
        if gap > needed {
            continue;
        }
        let by_min = bj_orthogonal_minimize(&x, &y, cfg)?;
        let by_state = bj_orthogonal_witness(&x, &y, cfg, opts)?;
        if !(by_min.holds && by_state.holds) {
            report.count("rejected_unconfirmed");
            continue;
        }
        report.count("counterexamples");
        if complex_field {
            report.fail(
                trial,
                "counterexample over ℂ",
                gap,
                ReplayCase::BjAsymmetry { x, y },
            );
        } else {
            report.witness(
                "x ⊥_B y with ‖x + y‖ ≤ ‖y‖ − 0.1",
                ReplayCase::BjAsymmetry { x, y },
            );
            report.set_metric("first_counterexample_trial", trial as f64);
            break;
        }
    }
    if !complex_field && report.witnesses.is_empty() {
        report.fail(
            trials,
            "no counterexample within the trial budget",
            -1.0,
            ReplayCase::Summary {
                description: format!("no confirmed counterexample in {trials} trials"),
            },
        );
    }
    Ok(report)
}
