//! Float math routed through `num_traits::Float` so the same libm-backed
//! functions serve both the `no_std` library build and the std test builds.

#![allow(dead_code)]

use num_traits::Float;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    Float::sqrt(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    Float::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    Float::ln(x)
}

#[inline]
pub fn log2(x: f64) -> f64 {
    Float::log2(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    Float::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    Float::cos(x)
}

#[inline]
pub fn asin(x: f64) -> f64 {
    Float::asin(x)
}

#[inline]
pub fn acos(x: f64) -> f64 {
    Float::acos(x)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    Float::ceil(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    Float::floor(x)
}

#[inline]
pub fn round(x: f64) -> f64 {
    Float::round(x)
}

#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    Float::powi(x, n)
}
