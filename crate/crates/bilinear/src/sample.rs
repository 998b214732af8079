//! Seeded random generation of scalars, vectors, Gram matrices and spaces.
//!
//! Used by the randomized refutation search and by the test suites; all
//! callers pass an explicit RNG so runs are reproducible.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use crate::field::{FieldSpec, Scalar};
use crate::linalg::{Matrix, Vector};
use crate::space::{BilinearSpace, Flavor};

/// A random scalar with small numerator/denominator over the infinite fields,
/// uniform over GF(p).
pub fn scalar(rng: &mut impl Rng, spec: FieldSpec) -> Scalar {
    if let Some(p) = spec.characteristic() {
        let v = rng.gen_range(0..p);
        return spec
            .parse_scalar(&v.to_string())
            .expect("residue in range");
    }
    let small_rat = |rng: &mut dyn FnMut() -> i64| {
        BigRational::new(BigInt::from(rng()), BigInt::from(1 + (rng().rem_euclid(3))))
    };
    if spec.radicand().is_some() {
        let mut draw = || rng.gen_range(-3i64..=3);
        let a = small_rat(&mut draw);
        let b = small_rat(&mut draw);
        Scalar::quadratic(spec, a, b).expect("quadratic spec")
    } else {
        let mut draw = || rng.gen_range(-4i64..=4);
        Scalar::Rat(small_rat(&mut draw))
    }
}

pub fn vector(rng: &mut impl Rng, spec: FieldSpec, dim: usize) -> Vector {
    (0..dim).map(|_| scalar(rng, spec)).collect()
}

pub fn tuple(rng: &mut impl Rng, spec: FieldSpec, dim: usize, len: usize) -> Vec<Vector> {
    (0..len).map(|_| vector(rng, spec, dim)).collect()
}

/// A random flavor-consistent Gram matrix.
pub fn gram(rng: &mut impl Rng, spec: FieldSpec, flavor: Flavor, dim: usize) -> Matrix {
    let mut g = Matrix::zeros(spec, dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            match flavor {
                Flavor::Plain => g.set(i, j, scalar(rng, spec)),
                Flavor::Symmetric => {
                    if i <= j {
                        let s = scalar(rng, spec);
                        g.set(i, j, s.clone());
                        g.set(j, i, s);
                    }
                }
                Flavor::Alternating => {
                    if i < j {
                        let s = scalar(rng, spec);
                        g.set(j, i, s.checked_neg().unwrap());
                        g.set(i, j, s);
                    }
                }
            }
        }
    }
    g
}

pub fn space(rng: &mut impl Rng, spec: FieldSpec, flavor: Flavor, dim: usize) -> BilinearSpace {
    BilinearSpace::from_gram(flavor, gram(rng, spec, flavor, dim)).expect("gram is flavor-consistent")
}

/// A random invertible square matrix (rejection sampling).
pub fn invertible(rng: &mut impl Rng, spec: FieldSpec, dim: usize) -> Matrix {
    loop {
        let rows: Vec<Vector> = (0..dim).map(|_| vector(rng, spec, dim)).collect();
        let m = Matrix::from_rows(spec, dim, &rows).expect("consistent rows");
        if m.rank() == dim {
            return m;
        }
    }
}
