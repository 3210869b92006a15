//! Interval annotations and the lower-semilattice operations over them.
//!
//! Annotations are closed subintervals of [0,1]. The lattice order runs from
//! the bottom element `[0,1]` (no knowledge) up towards the point intervals
//! `[x,x]`: `[l,u] ⊑ [l',u']` iff `l ≤ l'` and `u' ≤ u`. Tightening moves up
//! the order, shrinking uncertainty.
//!
//! Bounds live on a fixed decimal grid (multiples of 1e-15). Every
//! constructor and operator snaps to the grid, which keeps the lattice finite
//! and makes negation an exact involution in floating point.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Reciprocal of the annotation grid step. All bounds are integer multiples
/// of `1/GRID`.
const GRID: f64 = 1e15;

fn snap(x: f64) -> f64 {
    (x * GRID).round() / GRID
}

/// Errors from interval construction and annotation-function application.
#[derive(Debug, Error, PartialEq)]
pub enum AnnotationError {
    #[error("bounds [{lower}, {upper}] are not a valid subinterval of [0,1]")]
    InvalidBounds { lower: f64, upper: f64 },
    #[error("annotation function {fn_name} expects {expected} argument(s), got {got}")]
    ArityMismatch {
        fn_name: String,
        expected: String,
        got: usize,
    },
    #[error("annotation function {fn_name} produced degenerate bounds [{lower}, {upper}]")]
    DegenerateResult {
        fn_name: String,
        lower: f64,
        upper: f64,
    },
}

/// A closed subinterval of [0,1]; the annotation attached to a ground atom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(f64, f64)", into = "(f64, f64)")]
pub struct Interval {
    lower: f64,
    upper: f64,
}

impl Interval {
    /// Builds an interval, validating `0 ≤ lower ≤ upper ≤ 1`.
    pub fn new(lower: f64, upper: f64) -> Result<Self, AnnotationError> {
        if !(0.0..=1.0).contains(&lower) || !(0.0..=1.0).contains(&upper) || lower > upper {
            return Err(AnnotationError::InvalidBounds { lower, upper });
        }
        Ok(Self {
            lower: snap(lower),
            upper: snap(upper),
        })
    }

    /// The bottom element `[0,1]`: complete uncertainty.
    pub const fn bottom() -> Self {
        Self {
            lower: 0.0,
            upper: 1.0,
        }
    }

    /// The point interval `[x,x]`.
    pub fn point(x: f64) -> Result<Self, AnnotationError> {
        Self::new(x, x)
    }

    /// Classical truth `[1,1]`.
    pub const fn truth() -> Self {
        Self {
            lower: 1.0,
            upper: 1.0,
        }
    }

    /// Classical falsehood `[0,0]`.
    pub const fn falsehood() -> Self {
        Self {
            lower: 0.0,
            upper: 0.0,
        }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Residual uncertainty `upper − lower`.
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// Lattice order: `self ⊑ other` (other is at least as tight).
    pub fn leq(&self, other: &Interval) -> bool {
        self.lower <= other.lower && other.upper <= self.upper
    }

    /// `self ⊒ other`: self satisfies the bound `other`.
    pub fn geq(&self, other: &Interval) -> bool {
        other.leq(self)
    }

    /// Strong negation: `[l,u]` maps to `[1−u, 1−l]`.
    pub fn negate(&self) -> Interval {
        Interval {
            lower: snap(1.0 - self.upper),
            upper: snap(1.0 - self.lower),
        }
    }

    /// Least upper bound of two overlapping intervals:
    /// `[max(l,l'), min(u,u')]`. The caller must have confirmed consistency
    /// (see [`check_consistent`]); disjoint inputs would invert the bounds.
    pub fn tighten(&self, incoming: &Interval) -> Interval {
        debug_assert!(check_consistent(self, incoming));
        Interval {
            lower: self.lower.max(incoming.lower),
            upper: self.upper.min(incoming.upper),
        }
    }

    /// True when the two intervals overlap, i.e. a tightening exists.
    /// Returns false iff `incoming.lower > current.upper` or
    /// `incoming.upper < current.lower`.
    pub fn consistent_with(&self, incoming: &Interval) -> bool {
        !(incoming.lower > self.upper || incoming.upper < self.lower)
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{:?},{:?}]", self.lower, self.upper)
    }
}

impl TryFrom<(f64, f64)> for Interval {
    type Error = AnnotationError;
    fn try_from((l, u): (f64, f64)) -> Result<Self, Self::Error> {
        Interval::new(l, u)
    }
}

impl From<Interval> for (f64, f64) {
    fn from(iv: Interval) -> Self {
        (iv.lower, iv.upper)
    }
}

/// `tighten(current, incoming)`: see [`Interval::tighten`].
pub fn tighten(current: &Interval, incoming: &Interval) -> Interval {
    current.tighten(incoming)
}

/// Strong negation; an exact involution.
pub fn negate(x: &Interval) -> Interval {
    x.negate()
}

/// Symmetric overlap check between a stored bound and an incoming one.
pub fn check_consistent(current: &Interval, incoming: &Interval) -> bool {
    current.consistent_with(incoming)
}

/// Argument-count contract of an annotation function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    Exact(usize),
    AtLeast(usize),
    Any,
}

impl Arity {
    fn admits(&self, n: usize) -> bool {
        match *self {
            Arity::Exact(k) => n == k,
            Arity::AtLeast(k) => n >= k,
            Arity::Any => true,
        }
    }
}

impl std::fmt::Display for Arity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Arity::Exact(k) => write!(f, "exactly {k}"),
            Arity::AtLeast(k) => write!(f, "at least {k}"),
            Arity::Any => write!(f, "any number of"),
        }
    }
}

/// The built-in annotation functions usable in rule heads.
///
/// Symmetric functions are applied componentwise: the function over the
/// argument lower bounds gives the result lower bound, and likewise for the
/// uppers. `LinearScale` fixes the upper bound at 1 and `Constant` ignores
/// its arguments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AnnotationFn {
    /// Minimum; the Gödel t-norm.
    Min,
    /// Maximum; the Gödel t-conorm.
    Max,
    /// Product t-norm.
    Prod,
    /// Probabilistic sum `a + b − ab`; dual of the product t-norm.
    ProbSum,
    /// Łukasiewicz t-norm `max(0, a + b − 1)`, folded left over the arguments.
    Luk,
    /// Bounded sum `min(1, a + b)`; dual of the Łukasiewicz t-norm.
    BoundedSum,
    /// Arithmetic mean.
    Average,
    /// The k-th highest value among the arguments (1-based).
    KthHighest(usize),
    /// `c · x` on the single argument's lower bound; upper fixed at 1.
    LinearScale(f64),
    /// Fixed value, ignoring arguments.
    Constant(f64),
}

impl AnnotationFn {
    pub fn arity(&self) -> Arity {
        match self {
            AnnotationFn::LinearScale(_) => Arity::Exact(1),
            AnnotationFn::KthHighest(k) => Arity::AtLeast(*k),
            AnnotationFn::Constant(_) => Arity::Any,
            _ => Arity::AtLeast(1),
        }
    }

    /// Grammar-facing name.
    pub fn name(&self) -> String {
        match self {
            AnnotationFn::Min => "min".into(),
            AnnotationFn::Max => "max".into(),
            AnnotationFn::Prod => "prod".into(),
            AnnotationFn::ProbSum => "prob_sum".into(),
            AnnotationFn::Luk => "luk".into(),
            AnnotationFn::BoundedSum => "bounded_sum".into(),
            AnnotationFn::Average => "avg".into(),
            AnnotationFn::KthHighest(k) => format!("kth_highest({k};..)"),
            AnnotationFn::LinearScale(c) => format!("scale({c:?};..)"),
            AnnotationFn::Constant(c) => format!("{c:?}"),
        }
    }

    /// Scalar evaluation over one component (the lowers or the uppers).
    pub fn eval(&self, xs: &[f64]) -> f64 {
        match self {
            AnnotationFn::Min => xs.iter().copied().fold(f64::INFINITY, f64::min),
            AnnotationFn::Max => xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            AnnotationFn::Prod => xs.iter().product(),
            AnnotationFn::ProbSum => xs.iter().copied().reduce(|a, b| a + b - a * b).unwrap(),
            AnnotationFn::Luk => xs
                .iter()
                .copied()
                .reduce(|a, b| (a + b - 1.0).max(0.0))
                .unwrap(),
            AnnotationFn::BoundedSum => {
                xs.iter().copied().reduce(|a, b| (a + b).min(1.0)).unwrap()
            }
            AnnotationFn::Average => xs.iter().sum::<f64>() / xs.len() as f64,
            AnnotationFn::KthHighest(k) => {
                let mut v = xs.to_vec();
                v.sort_by(|a, b| b.partial_cmp(a).unwrap());
                v[*k - 1]
            }
            AnnotationFn::LinearScale(c) => c * xs[0],
            AnnotationFn::Constant(c) => *c,
        }
    }

    /// Componentwise application to a list of interval arguments.
    ///
    /// A result that clamps to `lower > upper` is reported as
    /// [`AnnotationError::DegenerateResult`] rather than silently repaired: it
    /// signals a malformed head function.
    pub fn apply(&self, args: &[Interval]) -> Result<Interval, AnnotationError> {
        if !self.arity().admits(args.len()) {
            return Err(AnnotationError::ArityMismatch {
                fn_name: self.name(),
                expected: self.arity().to_string(),
                got: args.len(),
            });
        }
        let lowers: Vec<f64> = args.iter().map(|iv| iv.lower).collect();
        let uppers: Vec<f64> = args.iter().map(|iv| iv.upper).collect();
        let (lo, hi) = match self {
            AnnotationFn::LinearScale(_) => (self.eval(&lowers), 1.0),
            AnnotationFn::Constant(c) => (*c, *c),
            _ => (self.eval(&lowers), self.eval(&uppers)),
        };
        let lo = snap(lo.clamp(0.0, 1.0));
        let hi = snap(hi.clamp(0.0, 1.0));
        if lo > hi {
            return Err(AnnotationError::DegenerateResult {
                fn_name: self.name(),
                lower: lo,
                upper: hi,
            });
        }
        Ok(Interval {
            lower: lo,
            upper: hi,
        })
    }
}

/// Applies an annotation function componentwise to interval arguments.
pub fn apply_annotation_fn(
    f: &AnnotationFn,
    args: &[Interval],
) -> Result<Interval, AnnotationError> {
    f.apply(args)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(l: f64, u: f64) -> Interval {
        Interval::new(l, u).unwrap()
    }

    #[test]
    fn tighten_examples() {
        assert_eq!(iv(0.0, 1.0).tighten(&iv(0.6, 1.0)), iv(0.6, 1.0));
        assert_eq!(iv(0.2, 0.8).tighten(&iv(0.2, 0.8)), iv(0.2, 0.8));
        assert_eq!(iv(0.3, 0.9).tighten(&iv(0.5, 1.0)), iv(0.5, 0.9));
    }

    #[test]
    fn tighten_moves_up_the_order() {
        let a = iv(0.3, 0.9);
        let b = iv(0.5, 1.0);
        let t = a.tighten(&b);
        assert!(a.leq(&t));
        assert!(b.leq(&t));
    }

    #[test]
    fn negate_examples() {
        assert_eq!(iv(1.0, 1.0).negate(), iv(0.0, 0.0));
        assert_eq!(iv(0.0, 1.0).negate(), iv(0.0, 1.0));
        assert_eq!(iv(0.2, 0.9).negate(), iv(0.1, 0.8));
    }

    #[test]
    fn negate_is_exact_involution_on_awkward_decimals() {
        // 1 − (1 − 0.3) rounds away from 0.3 in raw f64; the grid snap
        // restores it.
        for x in [0.3, 0.1, 0.7, 0.05, 0.123456789] {
            let a = iv(x, 1.0);
            assert_eq!(a.negate().negate(), a, "x = {x}");
        }
    }

    #[test]
    fn consistency_examples() {
        assert!(!check_consistent(&iv(0.0, 0.0), &iv(1.0, 1.0)));
        assert!(check_consistent(&Interval::bottom(), &iv(0.25, 0.3)));
        assert!(check_consistent(&iv(0.4, 0.6), &iv(0.5, 0.7)));
    }

    #[test]
    fn invalid_bounds_rejected() {
        assert!(Interval::new(0.7, 0.3).is_err());
        assert!(Interval::new(-0.1, 0.5).is_err());
        assert!(Interval::new(0.5, 1.3).is_err());
    }

    #[test]
    fn luk_example() {
        let out = AnnotationFn::Luk.apply(&[iv(0.6, 1.0), iv(0.7, 1.0)]).unwrap();
        assert_eq!(out.lower(), 0.3);
    }

    #[test]
    fn prod_identity() {
        let x = iv(0.4, 0.8);
        let out = AnnotationFn::Prod.apply(&[iv(1.0, 1.0), x]).unwrap();
        assert_eq!(out, x);
    }

    #[test]
    fn average_example() {
        let out = AnnotationFn::Average
            .apply(&[iv(0.8, 1.0), iv(0.6, 1.0)])
            .unwrap();
        assert_eq!(out.lower(), 0.7);
    }

    #[test]
    fn kth_highest_example() {
        let out = AnnotationFn::KthHighest(2)
            .apply(&[iv(0.9, 1.0), iv(0.5, 1.0), iv(0.7, 1.0)])
            .unwrap();
        assert_eq!(out.lower(), 0.7);
    }

    #[test]
    fn linear_scale_fixes_upper() {
        let out = AnnotationFn::LinearScale(0.6).apply(&[iv(0.5, 0.7)]).unwrap();
        assert_eq!(out, iv(0.3, 1.0));
    }

    #[test]
    fn arity_mismatch() {
        let err = AnnotationFn::LinearScale(0.6)
            .apply(&[iv(0.5, 1.0), iv(0.2, 1.0)])
            .unwrap_err();
        assert!(matches!(err, AnnotationError::ArityMismatch { .. }));
        let err = AnnotationFn::KthHighest(3).apply(&[iv(0.5, 1.0)]).unwrap_err();
        assert!(matches!(err, AnnotationError::ArityMismatch { .. }));
    }

    #[test]
    fn degenerate_result_is_an_error() {
        // max on lowers vs min on uppers cannot happen with one fn, but a
        // constant above a shrunk upper can: scale is safe, so force it via
        // kth-highest over inverted components is impossible — use Constant
        // against nothing. Degeneracy needs the head-side pairing, covered in
        // the rules module; here check the guard directly via Luk on a
        // crafted pair where uppers fold below lowers is impossible, so
        // instead assert the constructor-level guard.
        assert!(matches!(
            Interval::new(0.7, 0.3),
            Err(AnnotationError::InvalidBounds { .. })
        ));
    }

    fn arb_interval() -> impl Strategy<Value = Interval> {
        (0u64..=1000, 0u64..=1000).prop_map(|(a, b)| {
            let (l, u) = if a <= b { (a, b) } else { (b, a) };
            iv(l as f64 / 1000.0, u as f64 / 1000.0)
        })
    }

    proptest! {
        #[test]
        fn tighten_commutative_associative_idempotent(
            a in arb_interval(), b in arb_interval(), c in arb_interval()
        ) {
            prop_assume!(check_consistent(&a, &b) && check_consistent(&b, &c)
                && check_consistent(&a, &c));
            let ab = a.tighten(&b);
            prop_assume!(check_consistent(&ab, &c) && check_consistent(&a, &b.tighten(&c)));
            prop_assert_eq!(a.tighten(&b), b.tighten(&a));
            prop_assert_eq!(ab.tighten(&c), a.tighten(&b.tighten(&c)));
            prop_assert_eq!(a.tighten(&a), a);
        }

        #[test]
        fn tighten_never_widens(a in arb_interval(), b in arb_interval()) {
            prop_assume!(check_consistent(&a, &b));
            let t = a.tighten(&b);
            prop_assert!(t.width() <= a.width());
            prop_assert!(t.width() <= b.width());
        }

        #[test]
        fn negate_involution_and_width(a in arb_interval()) {
            prop_assert_eq!(a.negate().negate(), a);
            prop_assert_eq!(a.negate().width(), a.width());
        }

        #[test]
        fn consistency_symmetric(a in arb_interval(), b in arb_interval()) {
            prop_assert_eq!(check_consistent(&a, &b), check_consistent(&b, &a));
        }

        #[test]
        fn builtins_stay_bounded(
            args in proptest::collection::vec(arb_interval(), 1..6),
            k in 1usize..3,
            c in 0.0f64..=1.0
        ) {
            let fns = [
                AnnotationFn::Min, AnnotationFn::Max, AnnotationFn::Prod,
                AnnotationFn::ProbSum, AnnotationFn::Luk, AnnotationFn::BoundedSum,
                AnnotationFn::Average, AnnotationFn::KthHighest(k),
                AnnotationFn::LinearScale(c), AnnotationFn::Constant(c),
            ];
            for f in fns {
                if !f.arity().admits(args.len()) { continue; }
                let out = f.apply(&args).unwrap();
                prop_assert!((0.0..=1.0).contains(&out.lower()));
                prop_assert!((0.0..=1.0).contains(&out.upper()));
                prop_assert!(out.lower() <= out.upper());
            }
        }
    }
}
