//! The named exponent triples for given (d, p₁, p₂) and the exact check of
//! every relation asserted between them.

use num_traits::{One, Zero};
use serde::Serialize;

use super::triple::{fmt_rational, int, rat, to_f64, ExpTriple, Rational};
use crate::error::{NlkgError, Result};

/// Open window 4/d < p₁ < 4(d+1)/((d+2)(d-1)) for the small-amplitude power.
pub fn range_p1(d: usize) -> Result<(Rational, Rational)> {
    if d < 2 {
        return Err(NlkgError::ParamOutOfRange(format!("the p1 window needs d >= 2, got {d}")));
    }
    let dd = d as i64;
    Ok((rat(4, dd), rat(4 * (dd + 1), (dd + 2) * (dd - 1))))
}

/// Half-open window (4d-2)/(d(d-2)) < p₂ ≤ 4/(d-2) for the large-amplitude
/// power.
pub fn range_p2(d: usize) -> Result<(Rational, Rational)> {
    if d < 3 {
        return Err(NlkgError::ParamOutOfRange(format!("the p2 window needs d >= 3, got {d}")));
    }
    let dd = d as i64;
    Ok((rat(4 * dd - 2, dd * (dd - 2)), rat(4, dd - 2)))
}

/// The grid of the exponent checks: d ∈ {3, 4, 5, 6}, p₁ at the midpoint of
/// its window, p₂ at the midpoint and at 4/(d-2).
pub fn standard_grid() -> Vec<(usize, Rational, Rational)> {
    let mut out = Vec::new();
    for d in 3..=6 {
        let (a1, b1) = range_p1(d).expect("d >= 3");
        let (a2, b2) = range_p2(d).expect("d >= 3");
        let p1 = (a1 + b1) / int(2);
        out.push((d, p1.clone(), (&a2 + &b2) / int(2)));
        out.push((d, p1, b2));
    }
    out
}

/// Largest denominator searched when choosing ε and ν.
pub const MAX_DENOMINATOR: i64 = 1000;

/// The named triples of one parameter set.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentCatalog {
    pub d: usize,
    #[serde(serialize_with = "super::triple::ser_rational")]
    pub p1: Rational,
    #[serde(serialize_with = "super::triple::ser_rational")]
    pub p2: Rational,
    pub h: ExpTriple,
    pub w: ExpTriple,
    pub k: ExpTriple,
    pub v: ExpTriple,
    pub m_sharp: ExpTriple,
    pub s: ExpTriple,
    pub l: ExpTriple,
    pub m: ExpTriple,
    pub m_tilde: ExpTriple,
    pub m_hat: ExpTriple,
    pub n_tilde: ExpTriple,
    pub n: ExpTriple,
    pub q: ExpTriple,
    pub p: ExpTriple,
    pub y: ExpTriple,
    pub r: ExpTriple,
    pub g: ExpTriple,
    /// ν of the exponential-case triple X = (ν, 0, ν - ν²).
    #[serde(serialize_with = "super::triple::ser_rational")]
    pub nu: Rational,
    /// X in two space dimensions.
    pub x: ExpTriple,
    /// ε of the perturbed triples, when one exists (d ≥ 5).
    #[serde(skip)]
    pub epsilon: Option<Rational>,
    pub h_eps: Option<ExpTriple>,
    pub w_eps: Option<ExpTriple>,
    pub m_sharp_eps: Option<ExpTriple>,
    /// How the triples left implicit by their defining properties were
    /// fixed.
    pub derivations: Vec<String>,
}

fn diag(x: Rational, sigma: Rational) -> ExpTriple {
    ExpTriple::new(x.clone(), x, sigma)
}

/// W = ((d-1)/(2(d+1)), same, ½): diagonal with str⁰(W) = 0.
pub fn w_triple(d: usize) -> ExpTriple {
    let dd = d as i64;
    diag(rat(dd - 1, 2 * (dd + 1)), rat(1, 2))
}

/// K = (d/(2(d+2)), same, ½): diagonal with str¹(K) = 0.
pub fn k_triple(d: usize) -> ExpTriple {
    let dd = d as i64;
    diag(rat(dd, 2 * (dd + 2)), rat(1, 2))
}

/// H = (0, ½, 1), the energy space.
pub fn h_triple() -> ExpTriple {
    ExpTriple::frac((0, 1), (1, 2), (1, 1))
}

impl ExponentCatalog {
    /// The catalog, after checking p₁ and p₂ against their windows.
    pub fn new(d: usize, p1: &Rational, p2: &Rational) -> Result<Self> {
        let (a1, b1) = range_p1(d)?;
        let (a2, b2) = range_p2(d)?;
        if !(*p1 > a1 && *p1 < b1) {
            return Err(NlkgError::ParamOutOfRange(format!(
                "p1 = {} outside ({}, {}) for d = {d}",
                fmt_rational(p1),
                fmt_rational(&a1),
                fmt_rational(&b1)
            )));
        }
        if !(*p2 > a2 && *p2 <= b2) {
            return Err(NlkgError::ParamOutOfRange(format!(
                "p2 = {} outside ({}, {}] for d = {d}",
                fmt_rational(p2),
                fmt_rational(&a2),
                fmt_rational(&b2)
            )));
        }
        Ok(Self::unchecked(d, p1, p2))
    }

    /// The catalog without the window checks (d ≥ 3, p₁, p₂ > 0).
    pub fn unchecked(d: usize, p1: &Rational, p2: &Rational) -> Self {
        let dd = d as i64;
        let one = Rational::one();
        let two_over = rat(2, dd + 1);
        let h = h_triple();
        let w = w_triple(d);
        let k = k_triple(d);
        let v = &h.scale(&rat(1, dd + 2)) + &w.scale(&rat(dd + 1, dd + 2));
        let m_sharp = diag(&two_over / p2, Rational::zero());
        let s = ExpTriple::new(&one / (p1 + &one), &one / (int(2) * (p1 + &one)), Rational::zero());
        let l = ExpTriple::new(&one / (p2 + &one), &one / (int(2) * (p2 + &one)), Rational::zero());
        let shift = ExpTriple::new(int(dd), int(-1), Rational::zero());
        let sob = ExpTriple::new(Rational::zero(), rat(1, dd), one.clone());
        let m = (&ExpTriple::new(int(1 - dd), int(2), Rational::zero()).scale(&(&one / p2))
            + &shift.scale(&rat(dd - 2, 4)))
            .scale(&two_over);
        let n_tilde = (&ExpTriple::new(rat(1, 2), rat(dd - 1, 4), one.clone())
            + &ExpTriple::new(int(-dd), int(1), Rational::zero()).scale(&(&one - rat(dd - 2, 4) * p2)))
            .scale(&two_over);
        let m_tilde = &m + &sob.scale(&(&two_over / p2));
        let n = &n_tilde - &sob.scale(&two_over);
        let q = ExpTriple::new(int(1), int(2), int(2)).scale(&(&one / (p1 * int(dd + 1))));
        let p = ExpTriple::new(int(4), int(dd - 1), int(4)).scale(&rat(1, 2 * (dd + 1)));
        let y = ExpTriple::new(int(6), int(dd + 3), int(4)).scale(&rat(1, 2 * (dd + 1)));
        let m_hat = if *p2 > one {
            &m_tilde + &sob.scale(&(int(2) * (p2 - &one) / (p2 * int(dd + 1))))
        } else {
            m_tilde.clone()
        };
        let r = diag(rat(dd + 4, 2 * (dd + 2)) / (p1 + &one), rat(1, 2));
        let g = ExpTriple::new(rat(1, dd + 1), rat(dd + 3, 2 * (dd + 1)), Rational::zero())
            .scale(&rat(dd - 2, dd + 2));
        let nu = choose_nu();
        let x = x_triple(&nu);
        let mut cat = Self {
            d,
            p1: p1.clone(),
            p2: p2.clone(),
            h,
            w,
            k,
            v,
            m_sharp,
            s,
            l,
            m,
            m_tilde,
            m_hat,
            n_tilde,
            n,
            q,
            p,
            y,
            r,
            g,
            nu,
            x,
            epsilon: None,
            h_eps: None,
            w_eps: None,
            m_sharp_eps: None,
            derivations: vec![
                "W: first component as defined; diagonal ansatz b = c with str^0(W) = 0 gives (d-1)/(2(d+1))".into(),
                "K: first component as defined; diagonal ansatz b = c with str^1(K) = 0 gives d/(2(d+2))".into(),
                "R: diagonal, R = (r, r, 1/2) with r = (d+4)/(2(d+2)(p1+1)), forced by R + p1 R^0 = K^{*(1)}".into(),
                format!(
                    "nu: largest rational with denominator <= {MAX_DENOMINATOR} in (0, 1/10) meeting the X conditions"
                ),
            ],
        };
        if d >= 5 {
            if let Some(eps) = cat.choose_epsilon() {
                cat.set_epsilon(eps);
            }
            cat.derivations.push(format!(
                "epsilon: largest rational with denominator <= {MAX_DENOMINATOR} in (0, p1) meeting the strict \
                 conditions with H_eps, W_eps, M#_eps in [0,1]^2 x R"
            ));
        }
        cat
    }

    fn set_epsilon(&mut self, eps: Rational) {
        let (h, w, m) = eps_triples(self.d, &self.p2, &self.w, &self.m_sharp, &eps);
        self.h_eps = Some(h);
        self.w_eps = Some(w);
        self.m_sharp_eps = Some(m);
        self.epsilon = Some(eps);
    }

    /// The largest admissible ε with denominator ≤ [`MAX_DENOMINATOR`].
    ///
    /// The float bisection only proposes candidates; every candidate is
    /// confirmed in exact arithmetic.
    fn choose_epsilon(&self) -> Option<Rational> {
        let ok = |e: &Rational| eps_conditions_hold(self.d, &self.p1, &self.p2, &self.w, &self.m_sharp, e);
        // Bisect in floats for the edge of the feasible interval (0, ε*).
        let top = to_f64(&self.p1);
        let probe = |e: f64| ok(&float_to_rational(e));
        let mut hi = top;
        if !probe(hi * (1.0 - 1e-12)) {
            let mut lo = 0.0;
            let mut found = false;
            for k in 1..60 {
                let e = top * 0.5f64.powi(k);
                if probe(e) {
                    lo = e;
                    found = true;
                    break;
                }
            }
            if !found {
                return None;
            }
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if probe(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
        let mut best: Option<Rational> = None;
        for den in 1..=MAX_DENOMINATOR {
            let mut num = (hi * den as f64).floor() as i64 + 1;
            while num > 0 {
                let e = rat(num, den);
                if e < self.p1 && ok(&e) {
                    if best.as_ref().map_or(true, |b| e > *b) {
                        best = Some(e);
                    }
                    break;
                }
                if best.as_ref().is_some_and(|b| rat(num, den) <= *b) {
                    break;
                }
                num -= 1;
            }
        }
        best
    }
}

fn float_to_rational(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

/// X = (ν, 0, ν - ν²).
pub fn x_triple(nu: &Rational) -> ExpTriple {
    ExpTriple::new(nu.clone(), Rational::zero(), nu - nu * nu)
}

fn x_conditions_hold(nu: &Rational) -> bool {
    let x = x_triple(nu);
    let zero = Rational::zero();
    let w1 = w_triple(2).b;
    *nu > zero
        && *nu < rat(1, 10)
        && x.str_(&zero, 2) < zero
        && x.reg(&zero, 2) < Rational::one()
        && x.b > zero
        && x.b < w1
}

/// Largest ν with denominator ≤ [`MAX_DENOMINATOR`] in (0, 1/10) meeting
/// the X conditions.
pub fn choose_nu() -> Rational {
    let mut best = rat(1, MAX_DENOMINATOR);
    for den in 1..=MAX_DENOMINATOR {
        // Largest numerator with num/den < 1/10.
        let num = (den - 1) / 10;
        if num == 0 {
            continue;
        }
        let e = rat(num, den);
        if e > best && x_conditions_hold(&e) {
            best = e;
        }
    }
    best
}

fn eps_triples(d: usize, p2: &Rational, w: &ExpTriple, m_sharp: &ExpTriple, eps: &Rational) -> (ExpTriple, ExpTriple, ExpTriple) {
    let shift = ExpTriple::new(int(d as i64), int(-1), Rational::zero());
    let h = ExpTriple::new(eps * eps, (Rational::one() - eps) / int(2), Rational::zero());
    let we = w - &shift.scale(&(p2 * eps));
    let me = m_sharp + &shift.scale(eps);
    (h, we, me)
}

fn in_unit_square(z: &ExpTriple) -> bool {
    let (zero, one) = (Rational::zero(), Rational::one());
    z.b >= zero && z.b <= one && z.c >= zero && z.c <= one
}

fn eps_conditions_hold(d: usize, p1: &Rational, p2: &Rational, w: &ExpTriple, m_sharp: &ExpTriple, eps: &Rational) -> bool {
    let zero = Rational::zero();
    if !(*eps > zero && eps < p1) {
        return false;
    }
    let (h, we, me) = eps_triples(d, p2, w, m_sharp, eps);
    h.str_(&zero, d) < zero
        && me.str_(&zero, d) < zero
        && we.str_(&zero, d) < zero
        && h.reg(&zero, d) < Rational::one()
        && in_unit_square(&h)
        && in_unit_square(&we)
        && in_unit_square(&me)
}

/// Comparison operator of a relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Op {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "implies")]
    Implies,
}

impl Op {
    pub fn symbol(self) -> &'static str {
        match self {
            Op::Eq => "=",
            Op::Lt => "<",
            Op::Le => "<=",
            Op::Implies => "=>",
        }
    }
}

/// One checked relation, with both sides as exact strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub block: String,
    pub name: String,
    pub lhs: String,
    pub op: Op,
    pub rhs: String,
    pub holds: bool,
}

/// Output of [`verify_relations`].
#[derive(Debug, Clone, Serialize)]
pub struct RelationReport {
    pub d: usize,
    pub p1: String,
    pub p2: String,
    pub alpha: Option<String>,
    pub beta: Option<String>,
    pub epsilon: Option<String>,
    pub nu: String,
    pub catalog: ExponentCatalog,
    pub relations: Vec<Relation>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.relations.iter().all(|r| r.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Relation> {
        self.relations.iter().filter(|r| !r.holds)
    }

    /// Plain-text table of every relation.
    pub fn to_table(&self) -> String {
        let mut out = format!("d = {}, p1 = {}, p2 = {}\n", self.d, self.p1, self.p2);
        let named: [(&str, &ExpTriple); 17] = [
            ("H", &self.catalog.h),
            ("W", &self.catalog.w),
            ("K", &self.catalog.k),
            ("V", &self.catalog.v),
            ("M#", &self.catalog.m_sharp),
            ("S", &self.catalog.s),
            ("L", &self.catalog.l),
            ("M", &self.catalog.m),
            ("M~", &self.catalog.m_tilde),
            ("M^", &self.catalog.m_hat),
            ("N~", &self.catalog.n_tilde),
            ("N", &self.catalog.n),
            ("Q", &self.catalog.q),
            ("P", &self.catalog.p),
            ("Y", &self.catalog.y),
            ("R", &self.catalog.r),
            ("G", &self.catalog.g),
        ];
        for (name, z) in named {
            out.push_str(&format!("  {name:<3} = {z}\n"));
        }
        out.push_str(&format!("  X   = {} (d = 2, nu = {})\n", self.catalog.x, self.nu));
        if let Some(e) = &self.epsilon {
            out.push_str(&format!("  epsilon = {e}\n"));
        }
        for (label, v) in [("alpha", &self.alpha), ("beta", &self.beta)] {
            if let Some(v) = v {
                out.push_str(&format!("  {label} = {v}\n"));
            }
        }
        for r in &self.relations {
            out.push_str(&format!(
                "{} [{}] {}: {} {} {}\n",
                if r.holds { "ok  " } else { "FAIL" },
                r.block,
                r.name,
                r.lhs,
                r.op.symbol(),
                r.rhs
            ));
        }
        let fails = self.failures().count();
        out.push_str(&format!("{} relations, {} failing\n", self.relations.len(), fails));
        out
    }
}

struct Checker {
    block: &'static str,
    out: Vec<Relation>,
}

impl Checker {
    fn push(&mut self, name: &str, lhs: String, op: Op, rhs: String, holds: bool) {
        self.out.push(Relation { block: self.block.into(), name: name.into(), lhs, op, rhs, holds });
    }
    fn eq(&mut self, name: &str, a: &Rational, b: &Rational) {
        self.push(name, fmt_rational(a), Op::Eq, fmt_rational(b), a == b);
    }
    fn lt(&mut self, name: &str, a: &Rational, b: &Rational) {
        self.push(name, fmt_rational(a), Op::Lt, fmt_rational(b), a < b);
    }
    fn le(&mut self, name: &str, a: &Rational, b: &Rational) {
        self.push(name, fmt_rational(a), Op::Le, fmt_rational(b), a <= b);
    }
    fn teq(&mut self, name: &str, a: &ExpTriple, b: &ExpTriple) {
        self.push(name, a.to_string(), Op::Eq, b.to_string(), a == b);
    }
    fn truth(&mut self, name: &str, holds: bool) {
        self.push(name, holds.to_string(), Op::Eq, "true".into(), holds);
    }
    /// 0 ≤ x < ½.
    fn half_open(&mut self, name: &str, x: &Rational) {
        self.le(&format!("0 <= {name}"), &Rational::zero(), x);
        self.lt(&format!("{name} < 1/2"), x, &rat(1, 2));
    }
    /// 0 < x < 1.
    fn open_unit(&mut self, name: &str, x: &Rational) {
        self.lt(&format!("0 < {name}"), &Rational::zero(), x);
        self.lt(&format!("{name} < 1"), x, &Rational::one());
    }
}

/// Check every relation for (d, p₁, p₂) in exact arithmetic.
///
/// Relations are grouped in blocks: "base" (H, W, K, V), "sharp" (M♯ and
/// the two-dimensional X), "low" (S and L, d ≤ 4), "high" (the M, N, P, Q,
/// R, Y family with α and β, d ≥ 5), "g" (d ≥ 5) and "eps" (the perturbed
/// triples, d ≥ 5).
pub fn verify_relations(d: usize, p1: &Rational, p2: &Rational) -> Result<RelationReport> {
    if d < 3 {
        return Err(NlkgError::ParamOutOfRange(format!("the p2 window is empty for d = {d}")));
    }
    let c = ExponentCatalog::new(d, p1, p2)?;
    let (zero, one, half) = (Rational::zero(), Rational::one(), rat(1, 2));
    let dd = d as i64;
    let crit = rat(4, dd - 2);
    let mut ch = Checker { block: "base", out: Vec::new() };

    ch.eq("reg^0(H)", &c.h.reg(&zero, d), &one);
    ch.eq("reg^1(H)", &c.h.reg(&one, d), &one);
    ch.eq("reg^0(W)", &c.w.reg(&zero, d), &one);
    ch.eq("reg^1(K)", &c.k.reg(&one, d), &one);
    ch.eq("str^0(H)", &c.h.str_(&zero, d), &zero);
    ch.eq("str^1(H)", &c.h.str_(&one, d), &zero);
    ch.eq("str^0(W)", &c.w.str_(&zero, d), &zero);
    ch.eq("str^1(K)", &c.k.str_(&one, d), &zero);
    ch.truth("H is 1-admissible", c.h.is_admissible(&one, d));
    ch.truth("W is 1-admissible", c.w.is_admissible(&one, d));
    ch.truth("K is 1-admissible", c.k.is_admissible(&one, d));
    ch.teq("H^{*(1)}", &c.h.dual(&one), &ExpTriple::frac((1, 1), (1, 2), (0, 1)));
    ch.teq(
        "V = K + (-1,0,1)/(2(d+2))",
        &c.v,
        &(&c.k + &ExpTriple::frac((-1, 2 * (dd + 2)), (0, 1), (1, 2 * (dd + 2)))),
    );
    ch.eq("reg^0(K)", &c.k.reg(&zero, d), &rat(dd + 1, dd + 2));

    ch.block = "sharp";
    ch.lt("str^0(M#) < 0", &c.m_sharp.str_(&zero, d), &zero);
    ch.le("reg^0(M#) <= 1", &c.m_sharp.reg(&zero, d), &one);
    ch.lt("0 < M#_1", &zero, &c.m_sharp.b);
    ch.lt("M#_1 < W_1", &c.m_sharp.b, &c.w.b);
    let w2 = w_triple(2);
    ch.lt("str^0(X) < 0 (d=2)", &c.x.str_(&zero, 2), &zero);
    ch.lt("reg^0(X) < 1 (d=2)", &c.x.reg(&zero, 2), &one);
    ch.lt("0 < X_1", &zero, &c.x.b);
    ch.lt("X_1 < W_1 (d=2)", &c.x.b, &w2.b);

    if d <= 4 {
        ch.block = "low";
        ch.lt("str^1(S) < 0", &c.s.str_(&one, d), &zero);
        ch.lt("str^0(L) < 0", &c.l.str_(&zero, d), &zero);
        ch.lt("reg^1(S) < 1", &c.s.reg(&one, d), &one);
        if *p2 == crit {
            ch.le("reg^0(L) <= 1 (p2 critical)", &c.l.reg(&zero, d), &one);
        } else {
            ch.lt("reg^0(L) < 1", &c.l.reg(&zero, d), &one);
        }
    }

    let mut alpha = None;
    let mut beta = None;
    if d >= 5 {
        ch.block = "high";
        let reg0 = |z: &ExpTriple| z.reg(&zero, d);
        let reg1 = |z: &ExpTriple| z.reg(&one, d);
        let str0 = |z: &ExpTriple| z.str_(&zero, d);
        let str1 = |z: &ExpTriple| z.str_(&one, d);
        ch.eq("reg^0(N~) = 1", &reg0(&c.n_tilde), &one);
        ch.eq("-reg^0(Y) = 1", &-reg0(&c.y), &one);
        ch.le("reg^0(M^) <= -reg^0(Y)", &reg0(&c.m_hat), &-reg0(&c.y));
        ch.lt("reg^1(Q) < 1", &reg1(&c.q), &one);
        ch.lt("reg^1(P) < 1", &reg1(&c.p), &one);
        ch.lt("-reg^1(Y) < 1", &-reg1(&c.y), &one);
        ch.lt("str^0(M^) < 0", &str0(&c.m_hat), &zero);
        ch.lt("str^0(N~) < 0", &str0(&c.n_tilde), &zero);
        ch.lt("str^1(Q) < 0", &str1(&c.q), &zero);
        ch.lt("str^1(P) < 0", &str1(&c.p), &zero);
        ch.le("str^0(N~) <= str^0(Y) - 2", &str0(&c.n_tilde), &(str0(&c.y) - int(2)));
        ch.eq("str^1(P) = str^1(Y) - 2", &str1(&c.p), &(str1(&c.y) - int(2)));
        ch.half_open("M^_1", &c.m_hat.b);
        ch.half_open("M^_2", &c.m_hat.c);
        ch.half_open("Q_1", &c.q.b);
        ch.half_open("Q_2", &c.q.c);
        ch.half_open("R_1", &c.r.b);
        ch.lt("1 < dec^0(Y)", &one, &c.y.dec(&zero, d));
        ch.lt("1 < dec^1(Y)", &one, &c.y.dec(&one, d));
        ch.lt("Y_2 < 1/2 + 1/d", &c.y.c, &(&half + rat(1, dd)));
        ch.lt("N~_2 > 1/2 - 1/(d-1)", &(&half - rat(1, dd - 1)), &c.n_tilde.c);
        ch.lt("P_2 > 1/2 - 1/d", &(&half - rat(1, dd)), &c.p.c);
        ch.push(
            "reg^0(M^) = 1 only at p2 = 4/(d-2)",
            format!("reg^0(M^) = {}", fmt_rational(&reg0(&c.m_hat))),
            Op::Implies,
            format!("p2 = {}", fmt_rational(&crit)),
            reg0(&c.m_hat) != one || *p2 == crit,
        );

        let y1 = &c.n_tilde + &c.m.scale(p2);
        ch.teq("Y = N~ + p2 M", &c.y, &y1);
        ch.teq("Y = N + p2 M~", &c.y, &(&c.n + &c.m_tilde.scale(p2)));
        ch.teq("Y = P + p1 Q^0", &c.y, &(&c.p + &c.q.with_regularity(&zero).scale(p1)));
        ch.teq("Y = P^0 + p1 Q", &c.y, &(&c.p.with_regularity(&zero) + &c.q.scale(p1)));
        if *p2 > one {
            ch.teq("Y = N + M^ + (p2-1) M", &c.y, &(&(&c.n + &c.m_hat) + &c.m.scale(&(p2 - &one))));
        }
        ch.eq("P_3 = p1 Q_3", &c.p.sigma, &(p1 * &c.q.sigma));
        ch.eq("N~_3 = p2 M~_3", &c.n_tilde.sigma, &(p2 * &c.m_tilde.sigma));
        for (name, fine, coarse) in [
            ("M^ into M~", &c.m_hat, &c.m_tilde),
            ("M~ into M", &c.m_tilde, &c.m),
            ("N~ into N", &c.n_tilde, &c.n),
        ] {
            let sharp = fine.b == coarse.b
                && fine.c >= coarse.c
                && &fine.sigma - int(dd) * &fine.c == &coarse.sigma - int(dd) * &coarse.c;
            ch.truth(&format!("sharp embedding {name}"), sharp);
        }
        for (name, z, th) in [("N~", &c.n_tilde, 0), ("P", &c.p, 1)] {
            let theta = int(th);
            let bound = Rational::one() / (int(dd - 1) + &theta);
            let gap_z = &half - &z.c;
            let gap_y = &c.y.c - &half;
            ch.lt(&format!("0 < 1/2 - {name}_2 (theta={th})"), &zero, &gap_z);
            ch.lt(&format!("1/2 - {name}_2 < 1/(d-1+theta) (theta={th})"), &gap_z, &bound);
            ch.lt(&format!("0 < Y_2 - 1/2 (with {name}, theta={th})"), &zero, &gap_y);
            ch.lt(&format!("Y_2 - 1/2 < 1/(d-1+theta) (with {name}, theta={th})"), &gap_y, &bound);
        }

        let kd = c.k.dual(&one);
        ch.teq("R + p1 R^0 = K^{*(1)}", &(&c.r + &c.r.with_regularity(&zero).scale(p1)), &kd);
        let a = (&c.r.b - &c.w.b) / (&c.k.b - &c.w.b);
        ch.teq("R = (1-alpha) W + alpha K", &c.r, &(&c.w.scale(&(&one - &a)) + &c.k.scale(&a)));
        ch.open_unit("alpha", &a);
        let w0 = c.w.with_regularity(&zero);
        let r0 = c.r.with_regularity(&zero);
        let b = (&c.m_sharp.b - &w0.b) / (&r0.b - &w0.b);
        ch.teq("M# = (1-beta) W^0 + beta R^0", &c.m_sharp, &(&w0.scale(&(&one - &b)) + &r0.scale(&b)));
        ch.open_unit("beta", &b);
        alpha = Some(fmt_rational(&a));
        beta = Some(fmt_rational(&b));

        ch.block = "g";
        ch.eq("reg^0(G) = 1", &reg0(&c.g), &one);
        ch.lt("str^0(G) < 0", &str0(&c.g), &zero);
        let crit_exp = &crit + &one;
        ch.teq(
            "(2^*-1) G = W^{*(1)} - (1,0,1)/2",
            &c.g.scale(&crit_exp),
            &(&c.w.dual(&one) - &ExpTriple::frac((1, 2), (0, 1), (1, 2))),
        );

        ch.block = "eps";
        match (&c.epsilon, &c.h_eps, &c.w_eps, &c.m_sharp_eps) {
            (Some(eps), Some(he), Some(we), Some(me)) => {
                ch.open_unit("epsilon / p1", &(eps / p1));
                ch.lt("str^0(H_eps) < 0", &str0(he), &zero);
                ch.lt("str^0(M#_eps) < 0", &str0(me), &zero);
                ch.lt("str^0(W_eps) < 0", &str0(we), &zero);
                ch.lt("reg^0(H_eps) < 1", &reg0(he), &one);
                ch.eq("reg^0(W_eps) = reg^0(W)", &reg0(we), &reg0(&c.w));
                ch.eq("reg^0(W) = 1", &reg0(&c.w), &one);
                ch.eq("reg^0(M#_eps) = reg^0(M#)", &reg0(me), &reg0(&c.m_sharp));
                ch.le("reg^0(M#) <= 1", &reg0(&c.m_sharp), &one);
                let lhs = &(we + &me.scale(p2));
                ch.teq("W_eps + p2 M#_eps = W + p2 M#", lhs, &(&c.w + &c.m_sharp.scale(p2)));
                ch.teq("W + p2 M# = W^{*(1)}", &(&c.w + &c.m_sharp.scale(p2)), &c.w.dual(&one));
            }
            _ => ch.truth("an admissible epsilon exists", false),
        }
    }

    let relations = ch.out;
    Ok(RelationReport {
        d,
        p1: fmt_rational(p1),
        p2: fmt_rational(p2),
        alpha,
        beta,
        epsilon: c.epsilon.as_ref().map(fmt_rational),
        nu: fmt_rational(&c.nu),
        catalog: c,
        relations,
    })
}
