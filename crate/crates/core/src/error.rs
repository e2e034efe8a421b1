use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("branch error: {0}")]
    Branch(String),
    #[error("series did not converge: {0}")]
    NonConvergence(String),
    #[error("pole of the gamma function at {0}")]
    Pole(f64),
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("kinetic balance is singular: |C {sign} eps| = {value:e}")]
    SingularBalance { sign: char, value: f64 },
    #[error("spinor has zero norm")]
    ZeroNorm,
    #[error("inconsistent parameter map: {0}")]
    InconsistentMap(String),
    #[error("singular coordinate map: {0}")]
    SingularMap(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("singular prefactor: {0}")]
    SingularPrefactor(String),
    #[error("overflow during integration at r = {0}")]
    Overflow(f64),
    #[error("step size underflow at r = {0}")]
    StiffFailure(f64),
    #[error("mismatch does not change sign on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("bisection did not converge in {0} iterations")]
    MaxIterations(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
