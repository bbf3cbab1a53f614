//! Small dense-vector helpers shared by every module.

use crate::scalar::Scalar;

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    S::dot(a, b)
}

pub fn add<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn scale<S: Scalar>(a: &[S], c: &S) -> Vec<S> {
    a.iter().map(|x| x.clone() * c.clone()).collect()
}

pub fn add_assign<S: Scalar>(a: &mut [S], b: &[S]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x = x.clone() + y.clone();
    }
}

pub fn sub_assign<S: Scalar>(a: &mut [S], b: &[S]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x = x.clone() - y.clone();
    }
}

pub fn zeros<S: Scalar>(n: usize) -> Vec<S> {
    vec![S::zero(); n]
}

pub fn unit<S: Scalar>(n: usize, i: usize) -> Vec<S> {
    let mut v = zeros(n);
    v[i] = S::one();
    v
}

pub fn sum_of<S: Scalar>(vectors: &[Vec<S>], idx: &[usize], len: usize) -> Vec<S> {
    let mut acc = zeros(len);
    for &i in idx {
        add_assign(&mut acc, &vectors[i]);
    }
    acc
}

pub fn is_zero<S: Scalar>(a: &[S]) -> bool {
    a.iter().all(|x| x.approx_zero())
}

pub fn max_abs<S: Scalar>(a: &[S]) -> S {
    a.iter().fold(S::zero(), |m, x| {
        let ax = x.abs();
        if ax > m {
            ax
        } else {
            m
        }
    })
}

pub fn cast<S: Scalar, T: Scalar>(x: &S) -> T {
    if T::EXACT {
        T::from_rational(&x.to_rational())
    } else {
        T::from_f64(x.to_f64())
    }
}

pub fn convert<S: Scalar, T: Scalar>(a: &[S]) -> Vec<T> {
    a.iter().map(cast).collect()
}
