//! Built-in transition matrices used by the self-test and the CLI.

use crate::sft::TransitionMatrix;

/// The full `n`-shift (all-ones matrix).
pub fn full_shift(n: usize) -> TransitionMatrix {
    TransitionMatrix::new(&vec![vec![1; n]; n]).expect("full shift is valid")
}

/// The golden mean shift `[[1,1],[1,0]]`.
pub fn fibonacci() -> TransitionMatrix {
    TransitionMatrix::new(&[vec![1, 1], vec![1, 0]]).expect("valid")
}

/// `[[1,1,0],[0,1,1],[1,1,1]]`, Perron eigenvalue a cubic irrational.
pub fn cubic_a() -> TransitionMatrix {
    TransitionMatrix::new(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 1, 1]]).expect("valid")
}

/// `[[0,1,1],[1,0,1],[1,1,0]]`, Perron eigenvalue 2.
pub fn triangle() -> TransitionMatrix {
    TransitionMatrix::new(&[vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]).expect("valid")
}

/// The five matrices of the self-test, by name.
pub fn matrices() -> Vec<(&'static str, TransitionMatrix)> {
    vec![
        ("full2", full_shift(2)),
        ("full3", full_shift(3)),
        ("fibonacci", fibonacci()),
        ("cubic", cubic_a()),
        ("triangle", triangle()),
    ]
}

/// Looks up a built-in matrix by name.
pub fn by_name(name: &str) -> Option<TransitionMatrix> {
    matrices().into_iter().find(|(n, _)| *n == name).map(|(_, a)| a)
}
