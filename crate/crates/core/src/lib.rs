//! Certification of vanishing Iwasawa invariants (`μ = λ = 0`) for the
//! S-ramified `Z_p`-extension of an imaginary biquadratic field
//! `K = Q(√−m, √d)` in which the odd prime `p` splits completely.
//!
//! The crate is layered bottom-up:
//!
//! - [`padic`]: unit arithmetic in `Z/p^N Z` and Hensel square roots.
//! - [`quadratic`]: Legendre symbols, class numbers and fundamental units of
//!   the quadratic subfields.
//! - [`biquadratic`]: elements of `K`, their norms, integrality, and the four
//!   p-adic embeddings.
//! - [`criterion`]: the congruence depth `r` of the fundamental unit, local
//!   norm indices, and the certifier producing a [`criterion::CertReport`].
//! - [`generator`]: short-vector search for a generator of a principal power
//!   of a prime above `p`.
//! - [`cli`]: scans, caching and self-check suites behind the binary.

pub mod arith;
pub mod biquadratic;
pub mod cli;
pub mod criterion;
pub mod generator;
pub mod padic;
pub mod quadratic;
