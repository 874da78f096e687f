// Copyright 2026 Daepl Contributors
// SPDX-License-Identifier: Apache-2.0

//! Operator pencil analysis for linear differential-algebraic systems.
//!
//! A pencil is a pair of square real matrices `(E, A)` acting on the same
//! space. The pair describes the implicit evolution problem
//! `(E u)'(t) + A u(t) = 0`, `E u(0) = E u0`, whose well-posedness is
//! governed by the growth of the resolvent `(zE + A)^{-1}` on a right
//! half-plane. This crate provides the analysis tool chain:
//!
//! * [`subspace`]: tolerance-aware subspaces with span, image, preimage and
//!   comparison, the arithmetic everything else is built on;
//! * [`pencil`]: resolvent application, resolvent norms, and empirical
//!   estimation of the pencil index from norm growth on a sample grid;
//! * [`wong`]: the nested chain of invariant subspaces obtained by
//!   alternating image and preimage, with identity checks tying the chain
//!   to the resolvent;
//! * [`semigroup`]: extraction of a matrix generator on the stabilized
//!   subspace and propagation of initial values through it;
//! * [`laplace`]: contour-quadrature inversion of the resolvent
//!   representation, an independent route to the same trajectories;
//! * [`example`]: a discretized transport pencil with an indicator-function
//!   coefficient, used as a reproducible large-scale test bed.
//!
//! The crate is `no_std` (with `alloc`); file formats and the command line
//! front end live in the companion crate `daepl-cli`.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod error;
pub mod example;
pub mod laplace;
pub mod linalg;
pub mod pencil;
pub mod semigroup;
pub mod subspace;
pub mod trace;
pub mod wong;

pub use error::{Error, Result};
pub use pencil::{GridSpec, IndexEstimate, Pencil, ResolventSample};
pub use subspace::{Subspace, SubspaceRelation};
pub use trace::{Provenance, SolutionTrace};
pub use wong::WongResult;
