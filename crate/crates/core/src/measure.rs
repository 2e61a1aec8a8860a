//! Finitely supported signed measures with exact rational weights.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, int, parse_rational, to_f64, Rational};
use crate::space::SpaceKind;

/// `Σ_i w_i δ_{x_i}` over one space. Atoms are kept coalesced and sorted by
/// point; zero weights are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteMeasure {
    space: SpaceKind,
    atoms: BTreeMap<Rational, Rational>,
}

impl DiscreteMeasure {
    pub fn zero(space: SpaceKind) -> Self {
        DiscreteMeasure {
            space,
            atoms: BTreeMap::new(),
        }
    }

    pub fn dirac(space: SpaceKind, point: Rational) -> Result<Self> {
        Self::from_atoms(space, [(point, int(1))])
    }

    /// Builds a measure from `(point, weight)` pairs, merging repeated points.
    pub fn from_atoms<I>(space: SpaceKind, atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let mut m = Self::zero(space);
        for (x, w) in atoms {
            space.check(&x)?;
            m.add_atom(x, w);
        }
        Ok(m)
    }

    /// Adds `w δ_x` without checking that `x` lies in the space.
    pub(crate) fn add_atom(&mut self, x: Rational, w: Rational) {
        if w.is_zero() {
            return;
        }
        match self.atoms.entry(x) {
            Entry::Vacant(v) => {
                v.insert(w);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += w;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn space(&self) -> SpaceKind {
        self.space
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.atoms.iter()
    }

    pub fn weight_at(&self, x: &Rational) -> Rational {
        self.atoms.get(x).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn mass(&self) -> Rational {
        self.atoms.values().sum()
    }

    pub fn tv_norm(&self) -> Rational {
        self.atoms.values().map(|w| w.abs()).sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.atoms.values().all(|w| !w.is_negative())
    }

    pub fn is_probability(&self) -> bool {
        self.is_nonnegative() && self.mass() == int(1)
    }

    pub fn scale(&self, a: &Rational) -> DiscreteMeasure {
        let mut out = Self::zero(self.space);
        for (x, w) in &self.atoms {
            out.add_atom(x.clone(), a * w);
        }
        out
    }

    /// `⟨f, μ⟩ = Σ_i w_i f(x_i)`, weights converted to double at the final
    /// multiplication.
    pub fn pair(&self, f: &ScalarField) -> f64 {
        self.atoms.iter().map(|(x, w)| to_f64(w) * f.eval(x)).sum()
    }

    /// Exact pairing, available when `f` carries a rational evaluator.
    pub fn pair_exact(&self, f: &ScalarField) -> Option<Rational> {
        let exact = f.exact.as_ref()?;
        Some(self.atoms.iter().map(|(x, w)| w * exact(x)).sum())
    }
}

impl fmt::Display for DiscreteMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("0");
        }
        for (i, (x, w)) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}·δ[{}]", fmt_rational(w), fmt_rational(x))?;
        }
        Ok(())
    }
}

/// `a μ + b ν`, coalesced.
pub fn combine(a: &Rational, mu: &DiscreteMeasure, b: &Rational, nu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    if mu.space != nu.space {
        return Err(Error::SpaceMismatch {
            left: mu.space,
            right: nu.space,
        });
    }
    let mut out = mu.scale(a);
    for (x, w) in &nu.atoms {
        out.add_atom(x.clone(), b * w);
    }
    Ok(out)
}

/// `μ − ν`.
pub fn difference(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    combine(&int(1), mu, &int(-1), nu)
}

pub fn tv_norm(mu: &DiscreteMeasure) -> Rational {
    mu.tv_norm()
}

pub fn pair(f: &ScalarField, mu: &DiscreteMeasure) -> f64 {
    mu.pair(f)
}

type RealFn = dyn Fn(&Rational) -> f64 + Send + Sync;
type ExactFn = dyn Fn(&Rational) -> Rational + Send + Sync;

/// Bounded real function on a space, evaluated at exact points.
///
/// A field may carry an exact rational evaluator (polynomial fields such as
/// the coordinate or the circle hat); pairings then stay exact.
#[derive(Clone)]
pub struct ScalarField {
    name: String,
    eval: Arc<RealFn>,
    exact: Option<Arc<ExactFn>>,
    bound: Option<f64>,
    lip: Option<f64>,
}

impl ScalarField {
    pub fn new(name: impl Into<String>, eval: impl Fn(&Rational) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField {
            name: name.into(),
            eval: Arc::new(eval),
            exact: None,
            bound: None,
            lip: None,
        }
    }

    /// A field with rational values; the double evaluator rounds the exact one.
    pub fn exact(name: impl Into<String>, exact: impl Fn(&Rational) -> Rational + Send + Sync + 'static) -> Self {
        let exact: Arc<ExactFn> = Arc::new(exact);
        let rounded = Arc::clone(&exact);
        ScalarField {
            name: name.into(),
            eval: Arc::new(move |x| to_f64(&rounded(x))),
            exact: Some(exact),
            bound: None,
            lip: None,
        }
    }

    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = Some(bound);
        self
    }

    pub fn with_lip(mut self, lip: f64) -> Self {
        self.lip = Some(lip);
        self
    }

    pub fn constant(c: Rational) -> Self {
        let bound = to_f64(&c).abs();
        Self::exact("constant", move |_| c.clone())
            .with_bound(bound)
            .with_lip(0.0)
    }

    /// `f(x) = x`.
    pub fn coordinate() -> Self {
        Self::exact("coord", |x| x.clone())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn bound(&self) -> Option<f64> {
        self.bound
    }

    pub fn lip(&self) -> Option<f64> {
        self.lip
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn eval(&self, x: &Rational) -> f64 {
        let v = (self.eval)(x);
        if let Some(b) = self.bound {
            debug_assert!(v.abs() <= b + 1e-12, "field {} exceeds its bound at {x}", self.name);
        }
        v
    }

    pub fn eval_exact(&self, x: &Rational) -> Option<Rational> {
        self.exact.as_ref().map(|e| e(x))
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("name", &self.name)
            .field("exact", &self.exact.is_some())
            .field("bound", &self.bound)
            .field("lip", &self.lip)
            .finish()
    }
}

/// JSON form: `{ "space": "circle"|"ex2"|"real", "points": ["p/q", ...], "weights": ["p/q", ...] }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureFile {
    pub space: String,
    pub points: Vec<String>,
    pub weights: Vec<String>,
}

impl MeasureFile {
    pub fn from_measure(mu: &DiscreteMeasure) -> Self {
        let (points, weights) = mu.atoms().map(|(x, w)| (fmt_rational(x), fmt_rational(w))).unzip();
        MeasureFile {
            space: mu.space().tag().to_string(),
            points,
            weights,
        }
    }

    pub fn to_measure(&self) -> Result<DiscreteMeasure> {
        let space = SpaceKind::from_tag(&self.space)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown space {:?}", self.space)))?;
        if self.points.len() != self.weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} points but {} weights",
                self.points.len(),
                self.weights.len()
            )));
        }
        let mut atoms = Vec::with_capacity(self.points.len());
        for (i, (p, w)) in self.points.iter().zip(&self.weights).enumerate() {
            let x = parse_rational(&format!("points[{i}]"), p)?;
            let w = parse_rational(&format!("weights[{i}]"), w)?;
            atoms.push((x, w));
        }
        DiscreteMeasure::from_atoms(space, atoms)
    }

    pub fn parse(json: &str) -> Result<DiscreteMeasure> {
        let file: MeasureFile = serde_json::from_str(json)?;
        file.to_measure()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    type Atom = ((i64, i64), (i64, i64));

    fn circle(atoms: &[Atom]) -> DiscreteMeasure {
        DiscreteMeasure::from_atoms(
            SpaceKind::Circle,
            atoms.iter().map(|&((p, q), (a, b))| (rat(p, q), rat(a, b))),
        )
        .unwrap()
    }

    #[test]
    fn pairing() {
        let f = ScalarField::new("sq", |x| to_f64(x) * to_f64(x));
        let d = DiscreteMeasure::dirac(SpaceKind::Circle, rat(1, 4)).unwrap();
        assert_eq!(d.pair(&f), 0.0625);

        let mu = circle(&[((0, 1), (1, 3)), ((1, 2), (2, 3))]);
        assert_eq!(mu.pair(&ScalarField::constant(int(1))), 1.0);

        let half =
            DiscreteMeasure::from_atoms(SpaceKind::IntervalUnion, [(int(0), rat(1, 2)), (int(1), rat(1, 2))]).unwrap();
        assert_eq!(half.pair(&ScalarField::coordinate()), 0.5);
        assert_eq!(half.pair_exact(&ScalarField::coordinate()), Some(rat(1, 2)));
    }

    #[test]
    fn combine_coalesces() {
        let d = DiscreteMeasure::dirac(SpaceKind::Circle, rat(1, 3)).unwrap();
        let z = combine(&int(1), &d, &int(-1), &d).unwrap();
        assert!(z.is_empty());

        let d0 = DiscreteMeasure::dirac(SpaceKind::Circle, int(0)).unwrap();
        assert_eq!(combine(&rat(1, 2), &d0, &rat(1, 2), &d0).unwrap(), d0);

        let mu = circle(&[((0, 1), (1, 2)), ((1, 4), (1, 2))]);
        let nu = circle(&[((1, 4), (1, 2))]);
        let expected = circle(&[((0, 1), (1, 2)), ((1, 4), (1, 1))]);
        assert_eq!(combine(&int(1), &mu, &int(1), &nu).unwrap(), expected);
    }

    #[test]
    fn combine_rejects_space_mismatch() {
        let a = DiscreteMeasure::dirac(SpaceKind::Circle, int(0)).unwrap();
        let b = DiscreteMeasure::dirac(SpaceKind::RealLine, int(0)).unwrap();
        assert!(matches!(
            combine(&int(1), &a, &int(1), &b),
            Err(Error::SpaceMismatch { .. })
        ));
    }

    #[test]
    fn total_variation() {
        let x = DiscreteMeasure::dirac(SpaceKind::Circle, rat(1, 5)).unwrap();
        let y = DiscreteMeasure::dirac(SpaceKind::Circle, rat(2, 5)).unwrap();
        assert_eq!(difference(&x, &y).unwrap().tv_norm(), int(2));
        assert_eq!(circle(&[((0, 1), (1, 3)), ((1, 2), (2, 3))]).tv_norm(), int(1));
        let m =
            DiscreteMeasure::from_atoms(SpaceKind::IntervalUnion, [(int(0), rat(3, 4)), (int(1), rat(-1, 4))]).unwrap();
        assert_eq!(m.tv_norm(), int(1));
    }

    #[test]
    fn rejects_points_outside_space() {
        assert!(DiscreteMeasure::dirac(SpaceKind::Circle, int(1)).is_err());
        assert!(DiscreteMeasure::dirac(SpaceKind::IntervalUnion, rat(-1, 2)).is_err());
    }

    #[test]
    fn json_round_trip_and_errors() {
        let mu = circle(&[((0, 1), (3, 4)), ((1, 2), (1, 4))]);
        let json = serde_json::to_string(&MeasureFile::from_measure(&mu)).unwrap();
        assert_eq!(
            json,
            r#"{"space":"circle","points":["0/1","1/2"],"weights":["3/4","1/4"]}"#
        );
        assert_eq!(MeasureFile::parse(&json).unwrap(), mu);

        let bad = r#"{"space":"circle","points":["1/0"],"weights":["1"]}"#;
        let err = MeasureFile::parse(bad).unwrap_err().to_string();
        assert!(err.contains("points[0]"), "{err}");
    }

    fn small_measure() -> impl Strategy<Value = DiscreteMeasure> {
        prop::collection::vec((0i64..16, -8i64..=8), 0..6).prop_map(|atoms| {
            DiscreteMeasure::from_atoms(
                SpaceKind::Circle,
                atoms.into_iter().map(|(p, w)| (rat(p, 16), rat(w, 4))),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn combine_is_bilinear_and_commutative(
            mu in small_measure(), nu in small_measure(),
            a in -6i64..6, b in -6i64..6,
        ) {
            let (a, b) = (rat(a, 3), rat(b, 2));
            let lhs = combine(&a, &mu, &b, &nu).unwrap();
            prop_assert_eq!(&lhs, &combine(&b, &nu, &a, &mu).unwrap());
            prop_assert_eq!(lhs.mass(), &a * mu.mass() + &b * nu.mass());

            let f = ScalarField::new("cos", |x| (6.0 * to_f64(x)).cos());
            let lin = to_f64(&a) * mu.pair(&f) + to_f64(&b) * nu.pair(&f);
            prop_assert!((lhs.pair(&f) - lin).abs() < 1e-12);
        }
    }
}
