//! Seeded samplers for module vectors with prescribed orthogonality structure.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraElement, AlgebraShape};
use crate::linalg::{self, CMatrix};
use crate::module::ModuleVector;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for one trial of one stream, derived from the run seed.
pub fn trial_rng(seed: u64, stream: u64, trial: u64) -> ChaCha8Rng {
    let mixed = splitmix64(splitmix64(seed ^ splitmix64(stream)) ^ trial);
    ChaCha8Rng::seed_from_u64(mixed)
}

/// Orthogonal projection onto a random subspace of `ℂ^d` of the given rank.
pub fn random_projection<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> CMatrix {
    if rank == 0 {
        return CMatrix::zeros(d, d);
    }
    if rank >= d {
        return CMatrix::identity(d, d);
    }
    let u = linalg::random_unitary(d, rng);
    let q = u.columns(0, rank).into_owned();
    &q * q.adjoint()
}

/// Per-block random projections; ranks are drawn so both `p` and `1 − p` are nonzero
/// whenever the block allows it.
pub fn random_projection_element<R: Rng + ?Sized>(
    shape: &AlgebraShape,
    rng: &mut R,
) -> AlgebraElement {
    let blocks = shape
        .block_dims()
        .iter()
        .map(|&d| {
            let rank = if d == 1 {
                rng.random_range(0..=1)
            } else {
                rng.random_range(1..d)
            };
            random_projection(d, rank, rng)
        })
        .collect();
    AlgebraElement::from_blocks(shape.clone(), blocks).expect("conforming blocks")
}

/// Scale factor spread over `[0.5, 2]` so samples are not all of unit size.
fn random_scale<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(2f64.powf(rng.random_range(-1.0..=1.0)), 0.0)
}

/// `v − x(⟨x,x⟩ + ε)⁻¹⟨x,v⟩`, repeated to wash out rounding.
pub fn orthogonal_correction(x: &ModuleVector, v: &ModuleVector, passes: usize) -> ModuleVector {
    let p = x.squared_modulus();
    let eps = 1e-12 * x.norm().powi(2);
    if eps == 0.0 {
        return v.clone();
    }
    let regularized = &p + &AlgebraElement::scalar(x.shape(), Complex64::new(eps, 0.0));
    let inv = regularized.pseudo_inverse(1e-15);
    let mut y = v.clone();
    for _ in 0..passes {
        let g = x.inner_product(&y).expect("compatible");
        let correction = x.right_action(&(&inv * &g)).expect("same shape");
        y = y.try_sub(&correction).expect("compatible");
    }
    y
}

/// A pair with `⟨x, y⟩ = 0` up to rounding, built either by projecting the two vectors onto
/// complementary subspaces or by correcting a random `y` against `x`.
pub fn orthogonal_pair<R: Rng + ?Sized>(
    shape: &AlgebraShape,
    k: usize,
    rng: &mut R,
) -> (ModuleVector, ModuleVector) {
    let mut last = None;
    for attempt in 0..64 {
        let use_correction = k >= 2 && rng.random_bool(0.5);
        let (x, y) = if use_correction {
            let mut x = ModuleVector::random(shape, k, rng);
            if rng.random_bool(0.3) {
                // Rank-deficient x exercises the regularized inverse.
                x = x
                    .right_action(&random_projection_element(shape, rng))
                    .expect("same shape");
            }
            let v = ModuleVector::random(shape, k, rng);
            let y = orthogonal_correction(&x, &v, 3);
            (x, y)
        } else {
            let p = random_projection_element(shape, rng);
            let q = &AlgebraElement::identity(shape) - &p;
            let x = ModuleVector::random(shape, k, rng);
            let y = ModuleVector::random(shape, k, rng);
            let x =
                ModuleVector::new(x.entries().iter().map(|e| &p * e).collect()).expect("non-empty");
            let y =
                ModuleVector::new(y.entries().iter().map(|e| &q * e).collect()).expect("non-empty");
            (x, y)
        };
        let x = x.scale(random_scale(rng));
        let y = y.scale(random_scale(rng));
        let (nx, ny) = (x.norm(), y.norm());
        let residual = x.inner_product(&y).expect("compatible").norm();
        let degenerate = nx < 1e-8 || ny < 1e-8;
        let clean = residual <= 1e-12 * nx * ny;
        if clean && (!degenerate || attempt >= 8) {
            return (x, y);
        }
        if clean {
            last = Some((x, y));
        }
    }
    last.unwrap_or_else(|| {
        (
            ModuleVector::random(shape, k, rng),
            ModuleVector::zeros(shape, k),
        )
    })
}

/// Independent standard-normal vectors; orthogonal with probability zero.
pub fn generic_pair<R: Rng + ?Sized>(
    shape: &AlgebraShape,
    k: usize,
    rng: &mut R,
) -> (ModuleVector, ModuleVector) {
    let x = ModuleVector::random(shape, k, rng).scale(random_scale(rng));
    let y = ModuleVector::random(shape, k, rng).scale(random_scale(rng));
    (x, y)
}

/// A pair with `x ⊥_B y`: the vector state `ξ` at a top eigenvector of `⟨x,x⟩` is made to
/// annihilate `⟨x,y⟩` by subtracting a complex multiple of `x` from `y`.
pub fn bj_pair<R: Rng + ?Sized>(
    shape: &AlgebraShape,
    k: usize,
    rng: &mut R,
) -> (ModuleVector, ModuleVector) {
    let mut x = ModuleVector::random(shape, k, rng);
    if rng.random_bool(0.3) {
        x = x
            .right_action(&random_projection_element(shape, rng))
            .expect("same shape");
        if x.norm() < 1e-8 {
            x = ModuleVector::random(shape, k, rng);
        }
    }
    let y = ModuleVector::random(shape, k, rng);
    let y = bj_correction(&x, &y);
    (x, y)
}

/// `y − x·s` with `s = ξ*⟨x,y⟩ξ / ‖x‖²` for a top eigenvector `ξ` of `⟨x,x⟩`.
pub fn bj_correction(x: &ModuleVector, y: &ModuleVector) -> ModuleVector {
    let p = x.squared_modulus();
    let g = x.inner_product(y).expect("compatible");
    let mut best = (0, f64::NEG_INFINITY);
    for (b, blk) in p.blocks().iter().enumerate() {
        let top = linalg::max_hermitian_eigenvalue(blk);
        if top > best.1 {
            best = (b, top);
        }
    }
    let (b, top) = best;
    if top <= 0.0 {
        return y.clone();
    }
    let (_, vecs) = linalg::hermitian_eigen(p.block(b));
    let xi = vecs.column(vecs.ncols() - 1);
    let s = (xi.adjoint() * g.block(b) * xi)[(0, 0)] / top;
    let corrected = y.axpy(-s, x).expect("compatible");
    snap_cancelled_blocks(&corrected, y)
}

/// Zero every block of `v` that cancelled to rounding level relative to the same block of
/// `reference`; such dust is not orthogonal to anything.
fn snap_cancelled_blocks(v: &ModuleVector, reference: &ModuleVector) -> ModuleVector {
    let shape = v.shape();
    let block_norm = |w: &ModuleVector, b: usize| {
        w.entries()
            .iter()
            .map(|e| e.block(b).norm_squared())
            .sum::<f64>()
            .sqrt()
    };
    let cancelled: Vec<bool> = (0..shape.num_blocks())
        .map(|b| block_norm(v, b) <= 1e-12 * block_norm(reference, b))
        .collect();
    if !cancelled.contains(&true) {
        return v.clone();
    }
    let entries = v
        .entries()
        .iter()
        .map(|e| {
            let blocks = e
                .blocks()
                .iter()
                .zip(&cancelled)
                .map(|(blk, &c)| {
                    if c {
                        CMatrix::zeros(blk.nrows(), blk.ncols())
                    } else {
                        blk.clone()
                    }
                })
                .collect();
            AlgebraElement::from_blocks(shape.clone(), blocks).expect("conforming blocks")
        })
        .collect();
    ModuleVector::new(entries).expect("non-empty")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(d: &[usize]) -> AlgebraShape {
        AlgebraShape::new(d.to_vec()).unwrap()
    }

    #[test]
    fn trial_streams_are_reproducible_and_distinct() {
        let a: u64 = trial_rng(7, 1, 3).random();
        let b: u64 = trial_rng(7, 1, 3).random();
        let c: u64 = trial_rng(7, 1, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn orthogonal_pairs_are_orthogonal() {
        for s in [
            shape(&[1]),
            shape(&[2]),
            shape(&[1, 1]),
            shape(&[3]),
            shape(&[2, 3]),
        ] {
            for k in 1..=2 {
                let mut rng = trial_rng(1, 0, k as u64);
                for _ in 0..20 {
                    let (x, y) = orthogonal_pair(&s, k, &mut rng);
                    let r = x.inner_product(&y).unwrap().norm();
                    assert!(r <= 1e-12 * x.norm() * y.norm() + 1e-300, "{s} k={k}: {r}");
                }
            }
        }
    }

    #[test]
    fn bj_pairs_have_a_norming_state_killing_the_gram() {
        let s = shape(&[2, 1]);
        let mut rng = trial_rng(2, 0, 0);
        for _ in 0..20 {
            let (x, y) = bj_pair(&s, 2, &mut rng);
            let p = x.squared_modulus();
            let g = x.inner_product(&y).unwrap();
            let top = p.max_eigenvalue();
            let b = (0..2)
                .find(|&b| (linalg::max_hermitian_eigenvalue(p.block(b)) - top).abs() < 1e-12)
                .unwrap();
            let (_, v) = linalg::hermitian_eigen(p.block(b));
            let xi = v.column(v.ncols() - 1);
            assert!((xi.adjoint() * g.block(b) * xi)[(0, 0)].norm() < 1e-10 * (1.0 + top));
        }
    }
}
