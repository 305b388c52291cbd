//! Deformed quadratic algebras `T(V)[ħ] / (x_i x_j − x_j x_i − φ_ij)`:
//! Koszul-type PBW certificates, obstructions, cyclic potentials, and a
//! truncated rewriting oracle for Hilbert functions.

pub mod certify;
pub mod cyclic;
pub mod freealg;
pub mod io;
pub mod koszul;
pub mod presentation;
pub mod rewrite;
pub mod scalar;

pub use certify::{certify, CertificateReport, D2Choice, Verdict};
pub use cyclic::{CyclicWord, Potential};
pub use freealg::{NCPoly, Word};
pub use koszul::{KoszulPoly, KoszulSymbol};
pub use presentation::{validate, LieData, Presentation, QuadData};
pub use rewrite::{hilbert, HilbertReport, Mode};
pub use scalar::{FieldScalar, HPoly, HRat, Rational, Scalar};
