//! Exact matrices over Q(i): self-adjoint forms, realification, Smith normal
//! form over Z[i], Gram–Schmidt diagonalization with transform tracking,
//! denominators, and the complexity measure.

mod complexity;
mod gmat;
mod gram;
mod qmat;
mod selfadj;
mod snf;

pub use complexity::{
    complexity, complexity_norms, complexity_of_representation, max_complexity,
};
pub use gmat::{GaussIntMatrix, GaussMatrix};
pub use gram::{gram_schmidt_diagonalize, GramSchmidt, GramStep};
pub use qmat::{udu_decompose, QMatrix, UduDecomposition};
pub use selfadj::{self_adjoint_from_int_pairs, SelfAdjointMatrix};
pub use snf::{
    divisors_from_minor_gcds, integer_kernel, smith_normal_form, smith_rectangular,
    ElementaryDivisors,
};
