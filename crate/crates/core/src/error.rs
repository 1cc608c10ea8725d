use core::fmt;

/// Errors raised by the exact pipelines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoreError {
    NotPositiveDefinite(alloc::string::String),
    Parse(alloc::string::String),
    InvalidDiscriminant(i64),
    NotUnimodular,
    SlashDegree { degree: i32, k: u32 },
    MonomialDegree { l: u32, k: u32 },
    IndexOutOfRange { k: u32, n: u32 },
    WrongParity { k: u32, n: u32 },
    /// The CM point lies on a translate of the imaginary axis; principal-value periods are
    /// not supported by the exact pipeline.
    OnExceptionalSet(alloc::string::String),
    NotInKernel(alloc::string::String),
    CuspSpaceTooLarge { k: u32 },
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::NotPositiveDefinite(form) => write!(f, "form {form} is not positive definite"),
            CoreError::Parse(what) => write!(f, "cannot parse {what:?}; expected a,b,c"),
            CoreError::InvalidDiscriminant(d) => {
                write!(f, "{d} is not a negative discriminant (must be < 0 and 0 or 1 mod 4)")
            }
            CoreError::NotUnimodular => write!(f, "matrix does not have determinant 1"),
            CoreError::SlashDegree { degree, k } => write!(
                f,
                "degree {degree} exceeds 2k-2 = {} in weight {} slash",
                2 * *k as i32 - 2,
                2 - 2 * *k as i32
            ),
            CoreError::MonomialDegree { l, k } => {
                write!(f, "monomial degree {l} exceeds 2k-1 = {}", 2 * k - 1)
            }
            CoreError::IndexOutOfRange { k, n } => {
                write!(f, "period index n = {n} outside 0..={}", 2 * k - 2)
            }
            CoreError::WrongParity { k, n } => {
                write!(f, "no period polynomial of this parity for k = {k}, n = {n}")
            }
            CoreError::OnExceptionalSet(what) => write!(
                f,
                "{what} lies on a translate of the imaginary axis (E1); principal-value periods are not supported"
            ),
            CoreError::NotInKernel(residual) => {
                write!(f, "coefficients do not give a relation among the R_n; residual {residual}")
            }
            CoreError::CuspSpaceTooLarge { k } => {
                write!(f, "weight {} has more than one cusp form; supply cusp data", 2 * k)
            }
        }
    }
}

impl core::error::Error for CoreError {}
