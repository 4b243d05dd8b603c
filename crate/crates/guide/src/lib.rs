//! Runs the code listings of the book in `book/src` as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/numerics.md")]
pub mod numerics {}
#[doc = include_str!("../../../book/src/special-functions.md")]
pub mod special_functions {}
#[doc = include_str!("../../../book/src/half-line.md")]
pub mod half_line {}
#[doc = include_str!("../../../book/src/killed-kernel.md")]
pub mod killed_kernel {}
#[doc = include_str!("../../../book/src/interval-approximations.md")]
pub mod interval_approximations {}
#[doc = include_str!("../../../book/src/eigenvalue-bounds.md")]
pub mod eigenvalue_bounds {}
#[doc = include_str!("../../../book/src/monte-carlo.md")]
pub mod monte_carlo {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
