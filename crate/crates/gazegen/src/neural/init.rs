//! Weight initialization.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::neural::tensor::Tensor;

/// Gaussian init, the convention for dense and convolutional weights here.
pub fn normal(shape: &[usize], std: f64, rng: &mut impl Rng) -> Tensor {
    let dist = Normal::new(0.0, std).expect("valid std");
    let n: usize = shape.iter().product();
    let data: Vec<f64> = (0..n).map(|_| dist.sample(rng)).collect();
    Tensor::from_vec(shape, data).expect("shape matches data")
}

/// Uniform(−k, k) init used for recurrent weights.
pub fn uniform(shape: &[usize], k: f64, rng: &mut impl Rng) -> Tensor {
    let n: usize = shape.iter().product();
    let data: Vec<f64> = (0..n).map(|_| rng.random_range(-k..k)).collect();
    Tensor::from_vec(shape, data).expect("shape matches data")
}

pub const DENSE_INIT_STD: f64 = 0.02;
pub const CONV_INIT_STD: f64 = 0.02;
