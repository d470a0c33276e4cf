//! Scalars and the combinatorial substrate: Pochhammer symbols,
//! multinomials, the simplex lattice and bounded-sum kernel matrices.

mod combinat;
mod scalar;

use thiserror::Error;

pub use combinat::{
    binomial, enumerate_kernels, enumerate_lattice, factorial, for_each_kernel, multi_factorial,
    multinomial, pochhammer, KernelMatrix, KernelView, MultiIndex, SimplexLattice,
};
pub use scalar::{Approx, Exact, ParseScalarError, Scalar, DEFAULT_EPS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumericError {
    #[error("multi-index has degree {found}, expected {expected}")]
    DegreeMismatch { expected: u32, found: u32 },
    #[error("multi-index tail sums to {found}, exceeding degree {bound}")]
    DegreeExceeded { bound: u32, found: u32 },
}

#[cfg(test)]
mod proptests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn pochhammer_step(num in -30i64..30, den in 1i64..10, k in 0u32..12) {
            let a = Exact::from_ratio(num, den);
            let next = pochhammer(&a, k + 1);
            let step = pochhammer(&a, k) * (a.clone() + Exact::from_i64(k as i64));
            prop_assert_eq!(next, step);
        }

        #[test]
        fn multinomials_sum_to_power(d in 1usize..4, n in 0u32..7) {
            let total = enumerate_lattice(d, n)
                .iter()
                .map(|l| multinomial(n, l).unwrap())
                .fold(BigInt::from(0), |a, b| a + b);
            prop_assert_eq!(total, BigInt::from(d as u64 + 1).pow(n));
        }
    }
}
