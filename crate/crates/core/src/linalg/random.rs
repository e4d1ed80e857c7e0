//! Random test objects: Haar unitaries, pure states, Hermitian matrices.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::{inner, ComplexMatrix};
use super::state::PureState;

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed unitary via Gram-Schmidt on a Ginibre matrix.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex64> = (0..n).map(|_| gaussian(rng)).collect();
        for _ in 0..2 {
            for u in &cols {
                let c = inner(u, &v);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= c * y;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_columns(n, &cols)
}

pub fn random_state(num_qubits: usize, rng: &mut impl Rng) -> PureState {
    let d = 1usize << num_qubits;
    loop {
        let v: Vec<Complex64> = (0..d).map(|_| gaussian(rng)).collect();
        if let Ok(s) = PureState::normalized(v) {
            return s;
        }
    }
}

/// GUE-like Hermitian matrix.
pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| gaussian(rng));
    g.hermitian_part()
}

/// Unit vector of nonnegative weights drawn from a flat Dirichlet.
pub fn random_simplex(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -rng.gen_range(f64::MIN_POSITIVE..1.0).ln()).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = haar_unitary(8, &mut rng);
        assert!(u.unitary_defect() < 1e-12);
    }
}
