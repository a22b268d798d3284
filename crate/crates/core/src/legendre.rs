//! Legendre curves `E_lambda: y^2 = x(x-1)(x-lambda)` over `F_q`, the map
//! sending a swarm node `(a, b)` to `E_{b^2/a^2}`, and the explicit
//! 2-isogeny attached to each swarm edge.
//!
//! Everything here needs characteristic `p >= 7`.

use std::collections::BTreeSet;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::hypergeometric;
use crate::swarm::{agm_step, AdmissiblePair, Swarm};

/// Largest `q` for which [`LegendreCurve::group_structure`] enumerates points.
pub const MAX_ENUMERATION_ORDER: u32 = 20_000;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurvePoint {
    Identity,
    Affine { x: FieldElement, y: FieldElement },
}

impl CurvePoint {
    pub fn is_identity(&self) -> bool {
        matches!(self, CurvePoint::Identity)
    }
}

impl std::fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CurvePoint::Identity => write!(f, "O"),
            CurvePoint::Affine { x, y } => write!(f, "({x}, {y})"),
        }
    }
}

/// `E(F_q) = Z/n1 x Z/n2` with `n1 | n2`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GroupStructure {
    pub order: u64,
    pub n1: u64,
    pub n2: u64,
    /// 2-parts of `(n1, n2)`.
    pub sylow2: (u64, u64),
    pub trace: i64,
}

/// `{lambda, j, N, trace, n1, n2}` as exported in JSON.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveSummary {
    pub lambda: FieldElement,
    pub j: FieldElement,
    #[serde(rename = "N")]
    pub n: u64,
    pub trace: i64,
    pub n1: u64,
    pub n2: u64,
}

/// Curve data attached to a jellyfish by [`annotate_swarm`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JellyfishAnnotation {
    pub trace: i64,
    /// Group of `Psi` at the first bell-head node.
    pub group: GroupStructure,
    /// One summary per distinct curve in the image of the jellyfish,
    /// ordered by `lambda`.
    pub curves: Vec<CurveSummary>,
}

#[derive(Clone, Debug)]
pub struct LegendreCurve {
    field: Field,
    lambda: FieldElement,
}

fn check_characteristic(field: &Field) -> Result<()> {
    if field.p() < 7 {
        Err(Error::CharacteristicTooSmall(field.p()))
    } else {
        Ok(())
    }
}

impl LegendreCurve {
    pub fn new(field: &Field, lambda: FieldElement) -> Result<LegendreCurve> {
        check_characteristic(field)?;
        if lambda.is_zero() || lambda == field.one() || lambda.encoding() >= field.q() {
            return Err(Error::SingularCurve);
        }
        Ok(LegendreCurve { field: field.clone(), lambda })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn lambda(&self) -> FieldElement {
        self.lambda
    }

    /// `x(x-1)(x-lambda)`.
    pub fn rhs(&self, x: FieldElement) -> FieldElement {
        let k = &self.field;
        k.mul(k.mul(x, k.sub(x, k.one())), k.sub(x, self.lambda))
    }

    pub fn contains(&self, p: &CurvePoint) -> bool {
        match *p {
            CurvePoint::Identity => true,
            CurvePoint::Affine { x, y } => {
                x.encoding() < self.field.q() && y.encoding() < self.field.q() && self.field.square(y) == self.rhs(x)
            }
        }
    }

    /// All rational points, identity first, then affine points by `(x, y)`.
    pub fn points(&self) -> Vec<CurvePoint> {
        let k = &self.field;
        let mut pts = vec![CurvePoint::Identity];
        for x in k.elements() {
            let f = self.rhs(x);
            match k.phi(f) {
                0 => pts.push(CurvePoint::Affine { x, y: f }),
                1 => {
                    let r = k.canonical_sqrt(f).expect("square");
                    let (lo, hi) = if r < k.neg(r) { (r, k.neg(r)) } else { (k.neg(r), r) };
                    pts.push(CurvePoint::Affine { x, y: lo });
                    pts.push(CurvePoint::Affine { x, y: hi });
                }
                _ => {}
            }
        }
        pts
    }

    /// `|E(F_q)|` by the hypergeometric trace formula (exact arithmetic).
    pub fn point_count(&self) -> u64 {
        let value = hypergeometric::greene_2f1_phi(&self.field, self.lambda);
        let q = self.field.q() as i64;
        let minus_one = self.field.neg(self.field.one());
        let phi_m1 = self.field.phi(minus_one) as i64;
        // q * 2F1 is the integer numerator since the denominator is q.
        debug_assert_eq!(value.den, q as u64);
        (q + 1 + phi_m1 * value.num) as u64
    }

    /// `|E(F_q)|` by listing every point.
    pub fn point_count_enumerated(&self) -> u64 {
        let k = &self.field;
        1 + k.elements().map(|x| (1 + k.phi(self.rhs(x))) as u64).sum::<u64>()
    }

    pub fn neg(&self, p: CurvePoint) -> CurvePoint {
        match p {
            CurvePoint::Identity => p,
            CurvePoint::Affine { x, y } => CurvePoint::Affine { x, y: self.field.neg(y) },
        }
    }

    /// Chord-tangent addition on `y^2 = x^3 + a2 x^2 + a4 x` with
    /// `a2 = -(1 + lambda)`, `a4 = lambda`.
    pub fn add(&self, p: CurvePoint, q: CurvePoint) -> CurvePoint {
        let k = &self.field;
        let (x1, y1, x2, y2) = match (p, q) {
            (CurvePoint::Identity, _) => return q,
            (_, CurvePoint::Identity) => return p,
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let a2 = k.neg(k.add(k.one(), self.lambda));
        let slope = if x1 != x2 {
            k.div(k.sub(y2, y1), k.sub(x2, x1)).expect("x1 != x2")
        } else if y1 != y2 || y1.is_zero() {
            return CurvePoint::Identity;
        } else {
            // tangent: (3x^2 + 2 a2 x + a4) / 2y
            let three_x2 = k.mul(k.from_int(3), k.square(x1));
            let two_a2_x = k.mul(k.from_int(2), k.mul(a2, x1));
            let num = k.add(k.add(three_x2, two_a2_x), self.lambda);
            k.div(num, k.add(y1, y1)).expect("y1 != 0")
        };
        let x3 = k.sub(k.sub(k.sub(k.square(slope), a2), x1), x2);
        let y3 = k.sub(k.mul(slope, k.sub(x1, x3)), y1);
        CurvePoint::Affine { x: x3, y: y3 }
    }

    pub fn double(&self, p: CurvePoint) -> CurvePoint {
        self.add(p, p)
    }

    pub fn mul(&self, p: CurvePoint, mut n: u64) -> CurvePoint {
        let mut acc = CurvePoint::Identity;
        let mut base = p;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.double(base);
            n >>= 1;
        }
        acc
    }

    /// Invariant factors of `E(F_q)` by point enumeration.
    ///
    /// `n1` is the largest `n | gcd(N, q - 1)` with `|E[n](F_q)| = n^2`,
    /// assembled prime by prime.
    pub fn group_structure(&self) -> Result<GroupStructure> {
        if self.field.q() > MAX_ENUMERATION_ORDER {
            return Err(Error::TooLarge {
                what: "q for point enumeration",
                value: self.field.q() as u64,
                max: MAX_ENUMERATION_ORDER as u64,
            });
        }
        let pts = self.points();
        let order = pts.len() as u64;
        let by_formula = self.point_count();
        if by_formula != order {
            return Err(Error::Invariant(format!(
                "character sum gives {by_formula} points, enumeration gives {order} (lambda = {})",
                self.lambda
            )));
        }
        let g = order.gcd(&(self.field.q() as u64 - 1));
        let mut n1 = 1;
        for (ell, e) in arith::factorize(g) {
            let mut best = 1;
            let mut pk = 1;
            for _ in 0..e {
                pk *= ell;
                let torsion = pts.iter().filter(|&&p| self.mul(p, pk).is_identity()).count() as u64;
                if torsion != pk * pk {
                    break;
                }
                best = pk;
            }
            n1 *= best;
        }
        let n2 = order / n1;
        let two_part = |n: u64| 1u64 << n.trailing_zeros();
        Ok(GroupStructure {
            order,
            n1,
            n2,
            sylow2: (two_part(n1), two_part(n2)),
            trace: self.field.q() as i64 + 1 - order as i64,
        })
    }

    /// 2-descent: a point is in `2E(F_q)` iff `x - 0`, `x - 1` and
    /// `x - lambda` are all squares (zero counts as a square).
    pub fn halvable(&self, p: CurvePoint) -> bool {
        let k = &self.field;
        match p {
            CurvePoint::Identity => true,
            CurvePoint::Affine { x, .. } => {
                k.is_square(x) && k.is_square(k.sub(x, k.one())) && k.is_square(k.sub(x, self.lambda))
            }
        }
    }

    /// Shape `(2, 2^(2+b))` of the 2-Sylow subgroup for `lambda` a square.
    ///
    /// Also confirms that all three 2-torsion points are rational and that
    /// exactly one of them is halvable, i.e. the `Z/4` rank is one.
    pub fn two_sylow_shape(&self) -> Result<(u64, u64)> {
        let k = &self.field;
        if k.phi(self.lambda) != 1 {
            return Err(Error::NotASquareLambda);
        }
        let two_torsion: Vec<CurvePoint> =
            [k.zero(), k.one(), self.lambda].iter().map(|&x| CurvePoint::Affine { x, y: k.zero() }).collect();
        if !two_torsion.iter().all(|p| self.contains(p) && self.double(*p).is_identity()) {
            return Err(Error::Invariant("2-torsion is not fully rational".into()));
        }
        let halvable = two_torsion.iter().filter(|&&p| self.halvable(p)).count();
        if halvable != 1 {
            return Err(Error::Invariant(format!("{halvable} halvable 2-torsion points, expected 1")));
        }
        let group = self.group_structure()?;
        let (s1, s2) = group.sylow2;
        if s1 != 2 || s2 < 4 {
            return Err(Error::Invariant(format!("2-Sylow is Z/{s1} x Z/{s2}")));
        }
        Ok((s1, s2))
    }

    /// `2^8 (lambda^2 - lambda + 1)^3 / (lambda^2 (lambda - 1)^2)`.
    pub fn j_invariant(&self) -> FieldElement {
        let k = &self.field;
        let l = self.lambda;
        let inner = k.add(k.sub(k.square(l), l), k.one());
        let num = k.mul(k.from_int(256), k.pow(inner, 3));
        let den = k.mul(k.square(l), k.square(k.sub(l, k.one())));
        k.div(num, den).expect("lambda is not 0 or 1")
    }

    pub fn summary(&self) -> Result<CurveSummary> {
        let g = self.group_structure()?;
        Ok(CurveSummary {
            lambda: self.lambda,
            j: self.j_invariant(),
            n: g.order,
            trace: g.trace,
            n1: g.n1,
            n2: g.n2,
        })
    }
}

/// `lambda(a, b) = b^2 / a^2`.
pub fn lambda_of(field: &Field, pair: AdmissiblePair) -> FieldElement {
    field.div(field.square(pair.b), field.square(pair.a)).expect("a != 0")
}

/// The curve `E_{b^2/a^2}` attached to a swarm node.
pub fn psi(field: &Field, pair: AdmissiblePair) -> Result<LegendreCurve> {
    LegendreCurve::new(field, lambda_of(field, pair))
}

/// The 2-isogeny `Psi(pair) -> Psi(agm_step(pair))` with kernel `{O, (0,0)}`:
/// `(x, y) -> ((ax+b)^2 / (x(a+b)^2), -a y (ax-b)(ax+b) / (x^2 (a+b)^3))`.
pub fn isogeny_apply(field: &Field, pair: AdmissiblePair, point: CurvePoint) -> Result<CurvePoint> {
    let domain = psi(field, pair)?;
    if !domain.contains(&point) {
        return Err(Error::PointNotOnCurve);
    }
    let k = field;
    let (x, y) = match point {
        CurvePoint::Identity => return Ok(CurvePoint::Identity),
        CurvePoint::Affine { x, .. } if x.is_zero() => return Ok(CurvePoint::Identity),
        CurvePoint::Affine { x, y } => (x, y),
    };
    let (a, b) = (pair.a, pair.b);
    let s = k.add(a, b);
    let ax = k.mul(a, x);
    let plus = k.add(ax, b);
    let minus = k.sub(ax, b);
    let x_img = k.div(k.square(plus), k.mul(x, k.square(s)))?;
    let num = k.neg(k.mul(k.mul(k.mul(a, y), minus), plus));
    let den = k.mul(k.square(x), k.pow(s, 3));
    let y_img = k.div(num, den)?;
    Ok(CurvePoint::Affine { x: x_img, y: y_img })
}

/// Codomain of the isogeny leaving `pair`.
pub fn isogeny_codomain(field: &Field, pair: AdmissiblePair) -> Result<LegendreCurve> {
    psi(field, agm_step(field, pair))
}

/// Fills trace, group and curve summaries for every jellyfish.
///
/// Fails if some jellyfish maps to curves with different point counts or
/// groups, or if the image of `Psi` is not exactly `{E_{alpha^2}}` with
/// `q - 1` preimages each.
pub fn annotate_swarm(swarm: &mut Swarm) -> Result<()> {
    let field = swarm.field().clone();
    check_characteristic(&field)?;
    let q = field.q() as usize;

    let mut preimages = vec![0usize; q];
    for id in 0..swarm.node_count() as u32 {
        preimages[lambda_of(&field, swarm.pair(id)).encoding() as usize] += 1;
    }
    let square_lambdas: BTreeSet<FieldElement> = field
        .elements()
        .filter(|&a| !a.is_zero() && a != field.one() && a != field.neg(field.one()))
        .map(|a| field.square(a))
        .collect();
    for lam in field.elements() {
        let expected = if square_lambdas.contains(&lam) { q - 1 } else { 0 };
        if preimages[lam.encoding() as usize] != expected {
            return Err(Error::Invariant(format!(
                "E_{lam} has {} preimages, expected {expected}",
                preimages[lam.encoding() as usize]
            )));
        }
    }

    let summaries: Vec<(FieldElement, CurveSummary)> = square_lambdas
        .par_iter()
        .map(|&lam| Ok((lam, LegendreCurve::new(&field, lam)?.summary()?)))
        .collect::<Result<_>>()?;
    let mut by_lambda: Vec<Option<CurveSummary>> = vec![None; q];
    for (lam, s) in summaries {
        by_lambda[lam.encoding() as usize] = Some(s);
    }

    let annotations: Vec<JellyfishAnnotation> = swarm
        .jellyfish()
        .par_iter()
        .map(|jf| {
            let lambdas: BTreeSet<FieldElement> = jf.nodes().map(|v| lambda_of(&field, swarm.pair(v))).collect();
            let curves: Vec<CurveSummary> =
                lambdas.iter().map(|l| by_lambda[l.encoding() as usize].expect("lambda is a square")).collect();
            let first = curves[0];
            if let Some(bad) = curves.iter().find(|c| (c.n, c.n1, c.n2) != (first.n, first.n1, first.n2)) {
                return Err(Error::Invariant(format!(
                    "jellyfish {} mixes groups: E_{} has {} points, E_{} has {}",
                    jf.id, first.lambda, first.n, bad.lambda, bad.n
                )));
            }
            let rep = lambda_of(&field, swarm.pair(jf.cycle[0]));
            let group = LegendreCurve::new(&field, rep)?.group_structure()?;
            Ok(JellyfishAnnotation { trace: first.trace, group, curves })
        })
        .collect::<Result<_>>()?;
    for (jf, ann) in swarm.jellyfish_mut().iter_mut().zip(annotations) {
        jf.annotation = Some(ann);
    }
    Ok(())
}

/// Number of distinct groups among the curves hit by the swarm; at most
/// `d(F_q)` once the swarm is annotated.
pub fn distinct_groups(swarm: &Swarm) -> Result<usize> {
    let mut groups = BTreeSet::new();
    for jf in swarm.jellyfish() {
        let ann = jf.annotation.as_ref().ok_or(Error::NotAnnotated)?;
        groups.insert((ann.group.n1, ann.group.n2));
    }
    Ok(groups.len())
}
