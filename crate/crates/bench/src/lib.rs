//! Seeded inputs shared by the benchmarks.

use cstar_orth::forms::MultiForm;
use cstar_orth::sampling::{bj_pair, generic_pair, orthogonal_pair, trial_rng};
use cstar_orth::{AlgebraElement, AlgebraShape, ModuleVector};
use rand_chacha::ChaCha8Rng;

pub fn shape(dims: &[usize]) -> AlgebraShape {
    AlgebraShape::new(dims.to_vec()).expect("valid shape")
}

pub fn rng(stream: u64) -> ChaCha8Rng {
    trial_rng(7, stream, 0)
}

/// One orthogonal, one generic and one BJ-orthogonal pair.
pub fn pairs(s: &AlgebraShape, k: usize) -> [(&'static str, ModuleVector, ModuleVector); 3] {
    let mut r = rng(1);
    let (ox, oy) = orthogonal_pair(s, k, &mut r);
    let (gx, gy) = generic_pair(s, k, &mut r);
    let (bx, by) = bj_pair(s, k, &mut r);
    [("orthogonal", ox, oy), ("generic", gx, gy), ("bj", bx, by)]
}

/// A random form `E`, a random `c`, and `F = cE`.
pub fn form_pair(s: &AlgebraShape, k: usize, n: usize) -> (MultiForm, MultiForm, AlgebraElement) {
    let mut r = rng(2 + n as u64);
    let e = MultiForm::random(s, k, n, &mut r).expect("supported arity");
    let c = AlgebraElement::random(s, &mut r);
    let f = e.left_multiply(&c).expect("left multiplication");
    (e, f, c)
}

/// `n` random arguments for a form.
pub fn args(s: &AlgebraShape, k: usize, n: usize) -> Vec<ModuleVector> {
    let mut r = rng(10);
    (0..n).map(|_| ModuleVector::random(s, k, &mut r)).collect()
}
