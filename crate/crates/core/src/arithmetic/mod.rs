//! Exact scalar arithmetic: rationals, residues modulo prime powers and
//! elements of compositum cyclotomic fields.

pub mod cyclotomic;
pub mod modint;
pub mod qlinear;
pub mod rational;

pub use cyclotomic::{cyclotomic_modulus, CyclotomicField, CyclotomicNumber};
pub use modint::{factorize, is_prime, ModInt, PrimePower};
pub use rational::{format_rational, int, parse_rational, rat, Rational};
