//! Seeded generators and independent reference computations shared by the
//! integration tests.
#![allow(dead_code)]

use eprop::rational::{int, rat};
use eprop::{DiscreteMeasure, Rational, SpaceKind, UnitRational};
use num::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform rational in `[0,1)` with denominator at most `max_den`.
pub fn unit(r: &mut ChaCha8Rng, max_den: i64) -> UnitRational {
    let den = r.gen_range(1..=max_den);
    let num = r.gen_range(0..den);
    UnitRational::from_ratio(num, den).unwrap()
}

/// Rational point of `[-2,-1] ∪ [0,1]`.
pub fn ex2_point(r: &mut ChaCha8Rng, max_den: i64) -> Rational {
    let den = r.gen_range(1..=max_den);
    let num = r.gen_range(0..=den);
    if r.gen_bool(0.5) {
        rat(num, den)
    } else {
        rat(num, den) - int(2)
    }
}

pub fn point(r: &mut ChaCha8Rng, space: SpaceKind) -> Rational {
    match space {
        SpaceKind::Circle => unit(r, 1000).into_inner(),
        SpaceKind::IntervalUnion => ex2_point(r, 1000),
        _ => unreachable!("generator covers the built-in compact spaces"),
    }
}

/// Signed weight `p/q` with `|p/q| ≤ 1`.
pub fn weight(r: &mut ChaCha8Rng) -> Rational {
    let den = r.gen_range(1..=64i64);
    rat(r.gen_range(-den..=den), den)
}

pub fn signed_measure(r: &mut ChaCha8Rng, space: SpaceKind, max_support: usize) -> DiscreteMeasure {
    let n = r.gen_range(1..=max_support);
    let atoms: Vec<_> = (0..n).map(|_| (point(r, space), weight(r))).collect();
    DiscreteMeasure::from_atoms(space, atoms).unwrap()
}

pub fn probability_measure(r: &mut ChaCha8Rng, space: SpaceKind, max_support: usize) -> DiscreteMeasure {
    let n = r.gen_range(1..=max_support);
    let raw: Vec<i64> = (0..n).map(|_| r.gen_range(1..=20)).collect();
    let total: i64 = raw.iter().sum();
    let atoms: Vec<_> = raw.iter().map(|&w| (point(r, space), rat(w, total))).collect();
    DiscreteMeasure::from_atoms(space, atoms).unwrap()
}

/// `(m, y)` for the first `k` binary digits of `x`, by repeated doubling.
pub fn digits_by_doubling(x: &Rational, k: u32) -> (u64, Rational) {
    let mut y = x.clone();
    let mut ones = 0;
    for _ in 0..k {
        y *= int(2);
        if y >= Rational::one() {
            ones += 1;
            y -= Rational::one();
        }
    }
    (ones, y)
}

/// `P^k δ_x` for the doubling kernel, assembled from [`digits_by_doubling`].
pub fn ex1_reference(x: &Rational, k: u32) -> DiscreteMeasure {
    let (m, y) = digits_by_doubling(x, k);
    let tail = Rational::one() / Rational::from_integer(num::BigInt::one() << m as usize);
    let mut atoms = vec![(y, tail.clone())];
    if !(Rational::one() - &tail).is_zero() {
        atoms.push((Rational::zero(), Rational::one() - tail));
    }
    DiscreteMeasure::from_atoms(SpaceKind::Circle, atoms).unwrap()
}

/// Chord length from angles, independent of the library metric.
pub fn chord(x: f64, y: f64) -> f64 {
    let (ax, ay) = (std::f64::consts::TAU * x, std::f64::consts::TAU * y);
    ((ax.cos() - ay.cos()).powi(2) + (ax.sin() - ay.sin()).powi(2)).sqrt()
}

/// `‖w(δ_x − δ_y)‖_FM = |w| min(ρ, 1)`.
pub fn two_point_fm(w: f64, rho: f64) -> f64 {
    w.abs() * rho.min(1.0)
}

pub fn to_f64(x: &Rational) -> f64 {
    eprop::rational::to_f64(x)
}
