//! Strictly ergodic symbolic sequences and the spectral theory of the
//! operators they generate.
//!
//! The crate is organized around a pipeline:
//!
//! 1. [`generators`] produces finite windows of low-complexity sequences
//!    (Sturmian codings of irrational rotations, primitive substitution fixed
//!    points, codings of interval exchanges).
//! 2. [`words`] analyzes those windows combinatorially: subword complexity,
//!    Rauzy graphs, special factors, palindromes, powers, recurrence.
//! 3. [`schrodinger`] turns windows into potentials and drives the transfer
//!    matrix cocycle of the discrete Schrödinger operator, including the
//!    Gordon two/three-block criteria.
//! 4. [`tracemap`] iterates the Fibonacci/Sturmian trace recursion, tracks its
//!    conserved quantity, classifies escape, and brackets the band sets
//!    `sigma_k` of periodic approximants.
//! 5. [`spectrum`] estimates Lyapunov exponents, scans for their zero set,
//!    assembles spectral approximants, and fits box-counting dimensions.
//! 6. [`dynamics`] evolves wavepackets on finite lattices and measures
//!    time-averaged transport exponents via exact eigendecomposition sums.
//! 7. [`cmv`] builds unitary CMV/extended CMV matrices from unit-disk
//!    coefficient sequences and approximates their spectra on the circle.
//!
//! Everything is deterministic: identical inputs give identical outputs, so
//! the artifacts emitted by the CLI are byte-reproducible.

pub mod cmv;
pub mod dynamics;
pub mod generators;
pub mod intervals;
pub mod mat2;
pub mod model;
pub mod rational;
pub mod scalar;
pub mod schrodinger;
pub mod spectrum;
pub mod tracemap;
pub mod tridiag;
pub mod words;

pub use intervals::IntervalSet;
pub use rational::Rational;
pub use words::{Alphabet, Window, Word};
