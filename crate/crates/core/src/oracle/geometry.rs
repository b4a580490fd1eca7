//! Exact orientation predicates on rational points.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use crate::decimal::parse_rational;
use crate::error::{Error, Result};
use crate::linalg::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(crate::linalg::rat(x), crate::linalg::rat(y))
    }
}

/// Sign of the cross product `(b - a) x (c - a)`; positive for a left turn.
pub fn orientation(a: &Point, b: &Point, c: &Point) -> Ordering {
    let det = (&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x);
    if det.is_zero() {
        Ordering::Equal
    } else if det.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

fn strictly_between(p: &Point, a: &Point, b: &Point) -> bool {
    let inside = |v: &Rational, lo: &Rational, hi: &Rational| {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        lo <= v && v <= hi
    };
    p != a && p != b && inside(&p.x, &a.x, &b.x) && inside(&p.y, &a.y, &b.y)
}

/// Whether the closed segments `ab` and `cd` share a point other than a
/// common endpoint, i.e. whether drawing both would violate planarity.
pub fn segments_cross(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let shared = [a == c, a == d, b == c, b == d];
    let o1 = orientation(a, b, c);
    let o2 = orientation(a, b, d);
    let o3 = orientation(c, d, a);
    let o4 = orientation(c, d, b);
    if shared.iter().any(|&s| s) {
        // only collinear overlap can make segments with a common endpoint clash
        return o1 == Ordering::Equal
            && o2 == Ordering::Equal
            && (strictly_between(c, a, b)
                || strictly_between(d, a, b)
                || strictly_between(a, c, d)
                || strictly_between(b, c, d));
    }
    if o1 != o2 && o1 != Ordering::Equal && o2 != Ordering::Equal
        && o3 != o4 && o3 != Ordering::Equal && o4 != Ordering::Equal
    {
        return true;
    }
    (o1 == Ordering::Equal && strictly_between(c, a, b))
        || (o2 == Ordering::Equal && strictly_between(d, a, b))
        || (o3 == Ordering::Equal && strictly_between(a, c, d))
        || (o4 == Ordering::Equal && strictly_between(b, c, d))
}

/// Whether `p` lies strictly above the non-vertical line through `a` and `b`.
pub fn above_line(p: &Point, a: &Point, b: &Point) -> Option<bool> {
    match a.x.cmp(&b.x) {
        Ordering::Equal => None,
        Ordering::Less => Some(orientation(a, b, p) == Ordering::Greater),
        Ordering::Greater => Some(orientation(b, a, p) == Ordering::Greater),
    }
}

/// Parses one point per line as `x y`, each a rational `num/den` or integer.
/// Blank lines and lines starting with `#` are ignored.
pub fn parse_points(text: &str) -> Result<Vec<Point>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|line| {
            let mut parts = line.split_whitespace();
            let (Some(x), Some(y), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse(format!("expected 'x y', got '{line}'")));
            };
            Ok(Point::new(parse_rational(x)?, parse_rational(y)?))
        })
        .collect()
}
