//! Decorated planar binary trees and their rewriting calculus.
//!
//! A node `(o B A)` stands for `δ_ε^B A` and `(b B A)` for `δ_{ε⁻¹}^B A`: the
//! left child is the base point, the right child the argument. Two rules
//! generate the calculus:
//!
//! * R-FIX: `(c T T′) → T` when `T ≡ T′`;
//! * R-CANCEL: `(c T (c̄ T′ P)) → P` when `T ≡ T′`,
//!
//! where `≡` is equality of normal forms. Both rules shrink the tree.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::point::{Point, Scale};
use crate::sampling::rng;
use crate::structure::{DilatationStructure, Model};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    /// `∘`, the dilatation of coefficient `ε`.
    Eps,
    /// `•`, the dilatation of coefficient `ε⁻¹`.
    EpsInv,
}

impl Color {
    pub fn opposite(self) -> Color {
        match self {
            Color::Eps => Color::EpsInv,
            Color::EpsInv => Color::Eps,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Color::Eps => "o",
            Color::EpsInv => "b",
        }
    }

    /// The coefficient this color codes at scale `eps`.
    pub fn scale(self, eps: Scale) -> Scale {
        match self {
            Color::Eps => eps,
            Color::EpsInv => eps.inverse(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tree {
    Leaf(String),
    Node {
        color: Color,
        base: Box<Tree>,
        arg: Box<Tree>,
    },
}

pub fn leaf(symbol: &str) -> Tree {
    Tree::Leaf(symbol.to_string())
}

pub fn node(color: Color, base: Tree, arg: Tree) -> Tree {
    Tree::Node {
        color,
        base: Box::new(base),
        arg: Box::new(arg),
    }
}

/// `(o base arg)`.
pub fn o(base: Tree, arg: Tree) -> Tree {
    node(Color::Eps, base, arg)
}

/// `(b base arg)`.
pub fn b(base: Tree, arg: Tree) -> Tree {
    node(Color::EpsInv, base, arg)
}

impl Tree {
    /// Total number of nodes, leaves included.
    pub fn size(&self) -> usize {
        match self {
            Tree::Leaf(_) => 1,
            Tree::Node { base, arg, .. } => 1 + base.size() + arg.size(),
        }
    }

    pub fn leaves(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut BTreeSet<String>) {
        match self {
            Tree::Leaf(s) => {
                out.insert(s.clone());
            }
            Tree::Node { base, arg, .. } => {
                base.collect_leaves(out);
                arg.collect_leaves(out);
            }
        }
    }

    /// Grafts `by` at every leaf labelled `symbol`.
    pub fn substitute(&self, symbol: &str, by: &Tree) -> Tree {
        match self {
            Tree::Leaf(s) if s == symbol => by.clone(),
            Tree::Leaf(_) => self.clone(),
            Tree::Node { color, base, arg } => node(*color, base.substitute(symbol, by), arg.substitute(symbol, by)),
        }
    }

    /// The subtree reached by following `path` (`false` = base, `true` = arg).
    pub fn at(&self, path: &[bool]) -> Option<&Tree> {
        match (path.split_first(), self) {
            (None, _) => Some(self),
            (Some((step, rest)), Tree::Node { base, arg, .. }) => {
                if *step {
                    arg.at(rest)
                } else {
                    base.at(rest)
                }
            }
            (Some(_), Tree::Leaf(_)) => None,
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Leaf(s) => f.write_str(s),
            Tree::Node { color, base, arg } => write!(f, "({} {} {})", color.token(), base, arg),
        }
    }
}

pub fn render_tree(t: &Tree) -> String {
    t.to_string()
}

/// `Δ^x(u, v) = (b (o x u) (o x v))`.
pub fn delta_tree(x: Tree, u: Tree, v: Tree) -> Tree {
    b(o(x.clone(), u), o(x, v))
}

/// `Σ^x(u, v) = (b x (o (o x u) v))`.
pub fn sigma_tree(x: Tree, u: Tree, v: Tree) -> Tree {
    b(x.clone(), o(o(x, u), v))
}

/// `inv^x(u) = (b (o x u) x)`.
pub fn inv_tree(x: Tree, u: Tree) -> Tree {
    b(o(x.clone(), u), x)
}

pub fn build_delta(x: &str, u: &str, v: &str) -> Tree {
    delta_tree(leaf(x), leaf(u), leaf(v))
}

pub fn build_sigma(x: &str, u: &str, v: &str) -> Tree {
    sigma_tree(leaf(x), leaf(u), leaf(v))
}

pub fn build_inv(x: &str, u: &str) -> Tree {
    inv_tree(leaf(x), leaf(u))
}

fn is_symbol_byte(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c == b'\''
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        let bytes = self.text.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err<T>(&self, offset: usize, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            offset,
            message: message.into(),
        })
    }

    fn describe_here(&self) -> String {
        if self.pos >= self.text.len() {
            "end of input".into()
        } else {
            format!("`{}`", self.text[self.pos..].chars().next().unwrap())
        }
    }

    fn symbol(&mut self) -> Option<(usize, &'a str)> {
        let bytes = self.text.as_bytes();
        let start = self.pos;
        while self.pos < bytes.len() && is_symbol_byte(bytes[self.pos]) {
            self.pos += 1;
        }
        (self.pos > start).then(|| (start, &self.text[start..self.pos]))
    }

    fn tree(&mut self) -> Result<Tree> {
        self.skip_ws();
        let bytes = self.text.as_bytes();
        if self.pos >= bytes.len() {
            return self.err(self.pos, "expected a tree, found end of input");
        }
        if bytes[self.pos] == b'(' {
            self.pos += 1;
            self.skip_ws();
            let color = match self.symbol() {
                Some((_, "o")) => Color::Eps,
                Some((_, "b")) => Color::EpsInv,
                Some((at, other)) => return self.err(at, format!("unknown color token `{other}`")),
                None => return self.err(self.pos, format!("expected a color, found {}", self.describe_here())),
            };
            let base = self.tree()?;
            let arg = self.tree()?;
            self.skip_ws();
            if self.pos < bytes.len() && bytes[self.pos] == b')' {
                self.pos += 1;
                Ok(node(color, base, arg))
            } else {
                self.err(self.pos, format!("expected `)`, found {}", self.describe_here()))
            }
        } else {
            match self.symbol() {
                Some((_, s)) => Ok(leaf(s)),
                None => self.err(self.pos, format!("expected a tree, found {}", self.describe_here())),
            }
        }
    }
}

/// Parses `tree := symbol | "(" ("o" | "b") tree tree ")"`.
pub fn parse_tree(text: &str) -> Result<Tree> {
    let mut p = Parser { text, pos: 0 };
    let t = p.tree()?;
    p.skip_ws();
    if p.pos < text.len() {
        return p.err(p.pos, format!("trailing input {}", p.describe_here()));
    }
    Ok(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Fix,
    Cancel,
}

/// Applies a rule at the root of a tree whose children are already normal.
fn rewrite_root_normal(color: Color, base: &Tree, arg: &Tree) -> Option<Tree> {
    if base == arg {
        return Some(base.clone());
    }
    if let Tree::Node {
        color: inner,
        base: inner_base,
        arg: payload,
    } = arg
    {
        if *inner == color.opposite() && **inner_base == *base {
            return Some((**payload).clone());
        }
    }
    None
}

fn normalize_counting(t: &Tree, steps: &mut usize) -> Tree {
    match t {
        Tree::Leaf(_) => t.clone(),
        Tree::Node { color, base, arg } => {
            let nb = normalize_counting(base, steps);
            let na = normalize_counting(arg, steps);
            // Both rules return a child (or grandchild) of a normal tree, so
            // the result of one root rewrite is already normal.
            match rewrite_root_normal(*color, &nb, &na) {
                Some(r) => {
                    *steps += 1;
                    r
                }
                None => node(*color, nb, na),
            }
        }
    }
}

/// Innermost normalization; also returns the number of rewrites applied.
pub fn normalize_with_steps(t: &Tree) -> (Tree, usize) {
    let mut steps = 0;
    let nf = normalize_counting(t, &mut steps);
    (nf, steps)
}

pub fn normalize(t: &Tree) -> Tree {
    normalize_with_steps(t).0
}

pub fn is_normal(t: &Tree) -> bool {
    redex_positions(t).is_empty()
}

/// Every `(path, rule)` whose guard holds, in any tree (children need not
/// be normal; guards compare normal forms).
pub fn redex_positions(t: &Tree) -> Vec<(Vec<bool>, Rule)> {
    let mut out = Vec::new();
    collect_redexes(t, &mut Vec::new(), &mut out);
    out
}

fn collect_redexes(t: &Tree, path: &mut Vec<bool>, out: &mut Vec<(Vec<bool>, Rule)>) {
    if let Tree::Node { color, base, arg } = t {
        let nb = normalize(base);
        if nb == normalize(arg) {
            out.push((path.clone(), Rule::Fix));
        }
        if let Tree::Node {
            color: inner,
            base: inner_base,
            ..
        } = arg.as_ref()
        {
            if *inner == color.opposite() && normalize(inner_base) == nb {
                out.push((path.clone(), Rule::Cancel));
            }
        }
        path.push(false);
        collect_redexes(base, path, out);
        path.pop();
        path.push(true);
        collect_redexes(arg, path, out);
        path.pop();
    }
}

/// Applies `rule` at `path`, without checking its guard.
pub fn rewrite_at(t: &Tree, path: &[bool], rule: Rule) -> Option<Tree> {
    match (path.split_first(), t) {
        (None, Tree::Node { base, arg, .. }) => match rule {
            Rule::Fix => Some((**base).clone()),
            Rule::Cancel => match arg.as_ref() {
                Tree::Node { arg: payload, .. } => Some((**payload).clone()),
                Tree::Leaf(_) => None,
            },
        },
        (Some((step, rest)), Tree::Node { color, base, arg }) => {
            if *step {
                Some(node(*color, (**base).clone(), rewrite_at(arg, rest, rule)?))
            } else {
                Some(node(*color, rewrite_at(base, rest, rule)?, (**arg).clone()))
            }
        }
        _ => None,
    }
}

/// Normalizes by repeatedly firing a redex chosen by `pick` among all
/// current ones. Used to probe confluence.
pub fn normalize_by<F>(t: &Tree, mut pick: F) -> (Tree, usize)
where
    F: FnMut(usize) -> usize,
{
    let mut cur = t.clone();
    let mut steps = 0;
    loop {
        let redexes = redex_positions(&cur);
        if redexes.is_empty() {
            return (cur, steps);
        }
        let (path, rule) = &redexes[pick(redexes.len()) % redexes.len()];
        cur = rewrite_at(&cur, path, *rule).expect("redex position is valid");
        steps += 1;
    }
}

/// Random tree with at most `max_size` nodes over `symbols`.
///
/// Subtrees are reused with some probability so that rewrite rules actually
/// fire.
pub fn random_tree<R: Rng>(rng: &mut R, max_size: usize, symbols: &[&str]) -> Tree {
    let mut pool: Vec<Tree> = symbols.iter().map(|s| leaf(s)).collect();
    let target = rng.gen_range(1..=max_size.max(1));
    let mut current = pool[rng.gen_range(0..pool.len())].clone();
    while current.size() < target {
        let color = if rng.gen_bool(0.5) { Color::Eps } else { Color::EpsInv };
        let other = if rng.gen_bool(0.4) {
            pool[rng.gen_range(0..pool.len())].clone()
        } else {
            leaf(symbols[rng.gen_range(0..symbols.len())])
        };
        let mut next = if rng.gen_bool(0.5) {
            node(color, other, current.clone())
        } else {
            node(color, current.clone(), other)
        };
        // occasionally wrap so that an R-CANCEL redex appears at the root
        if rng.gen_bool(0.25) {
            if let Tree::Node { color, base, .. } = &next {
                let wrapped = node(color.opposite(), (**base).clone(), next.clone());
                if wrapped.size() <= max_size {
                    next = wrapped;
                }
            }
        }
        if next.size() > max_size {
            break;
        }
        pool.push(next.clone());
        current = next;
    }
    current
}

/// Evaluates a tree in a structure. Node `(c B A)` evaluates to
/// `δ^{eval B}(eval A)` with the coefficient coded by `c`.
pub fn eval_tree(
    t: &Tree,
    ds: &dyn DilatationStructure,
    assignment: &BTreeMap<String, Point>,
    eps: Scale,
) -> Result<Point> {
    match t {
        Tree::Leaf(s) => assignment
            .get(s)
            .cloned()
            .ok_or_else(|| Error::UnassignedLeaf(s.clone())),
        Tree::Node { color, base, arg } => {
            let bp = eval_tree(base, ds, assignment, eps)?;
            let ap = eval_tree(arg, ds, assignment, eps)?;
            ds.dilate(color.scale(eps), &bp, &ap)
                .map_err(|source| Error::TreeEvaluation {
                    subtree: t.to_string(),
                    source,
                })
        }
    }
}

/// Absolute evaluated gap above which a trial refutes an identity.
pub const REFUTATION_THRESHOLD: f64 = 1e-6;
/// Range of the random coefficients used in refutation trials.
pub const TRIAL_EPS_RANGE: (f64, f64) = (0.05, 0.9);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Proved,
    Refuted,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Proved => "Proved",
            Status::Refuted => "Refuted",
            Status::Unknown => "Unknown",
        })
    }
}

/// A concrete evaluation separating two trees.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub instance: String,
    pub assignment: BTreeMap<String, Point>,
    pub eps: f64,
    pub lhs: Point,
    pub rhs: Point,
    pub gap: f64,
}

pub const WITNESS_CSV_HEADER: &str = "instance,epsilon,assignment,gap";

/// `x=0;u=1;v=2;w=3`; coordinates of one leaf are joined by `;` as well.
pub fn format_assignment(assignment: &BTreeMap<String, Point>) -> String {
    assignment
        .iter()
        .map(|(k, p)| format!("{k}={}", p.join(";")))
        .collect::<Vec<_>>()
        .join(";")
}

/// Inverse of [`format_assignment`]: a token containing `=` starts a new
/// leaf, other tokens append coordinates to the current one.
pub fn parse_assignment(text: &str) -> Result<BTreeMap<String, Point>> {
    let mut out: BTreeMap<String, Point> = BTreeMap::new();
    let mut current: Option<String> = None;
    for tok in text.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let (name, value) = match tok.split_once('=') {
            Some((k, v)) => {
                let k = k.trim().to_string();
                current = Some(k.clone());
                (k, v)
            }
            None => match &current {
                Some(k) => (k.clone(), tok),
                None => return Err(Error::InvalidParameter(format!("coordinate `{tok}` before any leaf name"))),
            },
        };
        let c: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad coordinate `{value}` for leaf `{name}`")))?;
        out.entry(name).or_insert_with(|| Point(Vec::new())).0.push(c);
    }
    Ok(out)
}

impl Witness {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.instance,
            self.eps,
            format_assignment(&self.assignment),
            self.gap
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceVerdict {
    pub status: Status,
    pub witness: Option<Witness>,
    /// Rewrites used to normalize both sides.
    pub rewrite_steps: usize,
    pub trials_run: usize,
    pub trials_skipped: usize,
}

/// Evaluates both trees and their model-distance gap.
pub fn evaluate_pair(
    lhs: &Tree,
    rhs: &Tree,
    ds: &dyn DilatationStructure,
    assignment: &BTreeMap<String, Point>,
    eps: Scale,
) -> Result<Witness> {
    let l = eval_tree(lhs, ds, assignment, eps)?;
    let r = eval_tree(rhs, ds, assignment, eps)?;
    let gap = ds.distance(&l, &r);
    Ok(Witness {
        instance: ds.name(),
        assignment: assignment.clone(),
        eps: eps.value(),
        lhs: l,
        rhs: r,
        gap,
    })
}

/// Re-evaluates a recorded witness.
pub fn evaluate_witness(lhs: &Tree, rhs: &Tree, ds: &dyn DilatationStructure, w: &Witness) -> Result<Witness> {
    evaluate_pair(lhs, rhs, ds, &w.assignment, Scale::new(w.eps)?)
}

/// Decides `a ≈ b`: Proved by equal normal forms, Refuted by a numeric
/// witness in one of `models`, Unknown otherwise.
///
/// Trials draw every leaf uniformly from `[-1, 1]^dim` and `ε` from
/// [`TRIAL_EPS_RANGE`]; trials that leave a local domain are skipped.
pub fn equivalent(a: &Tree, b: &Tree, models: &[Model], trials: usize, seed: u64) -> Result<EquivalenceVerdict> {
    let (na, sa) = normalize_with_steps(a);
    let (nb, sb) = normalize_with_steps(b);
    let mut verdict = EquivalenceVerdict {
        status: Status::Unknown,
        witness: None,
        rewrite_steps: sa + sb,
        trials_run: 0,
        trials_skipped: 0,
    };
    if na == nb {
        verdict.status = Status::Proved;
        return Ok(verdict);
    }
    let (la, lb) = (a.leaves(), b.leaves());
    if la != lb {
        return Err(Error::LeafSetMismatch {
            left: la.into_iter().collect(),
            right: lb.into_iter().collect(),
        });
    }
    let mut r = rng(seed);
    for ds in models {
        for _ in 0..trials {
            let assignment: BTreeMap<String, Point> = la
                .iter()
                .map(|s| {
                    let p = Point((0..ds.dim()).map(|_| r.gen_range(-1.0..=1.0)).collect());
                    (s.clone(), p)
                })
                .collect();
            let eps = Scale::of(r.gen_range(TRIAL_EPS_RANGE.0..=TRIAL_EPS_RANGE.1));
            match evaluate_pair(a, b, ds.as_ref(), &assignment, eps) {
                Ok(w) => {
                    verdict.trials_run += 1;
                    if w.gap > REFUTATION_THRESHOLD {
                        verdict.status = Status::Refuted;
                        verdict.witness = Some(w);
                        return Ok(verdict);
                    }
                }
                Err(Error::TreeEvaluation { .. }) => verdict.trials_skipped += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(verdict)
}

/// Leaf assignment `x = 0, u = 1, v = 2, w = 3` at `ε = 0.5` on `ℝ¹`, which
/// separates `Σ(Σ(u, v), w)` (4.25) from `Σ(u, Σ(v, w))` (4.5).
pub fn euclidean_associativity_witness() -> Witness {
    let assignment = [("x", 0.0), ("u", 1.0), ("v", 2.0), ("w", 3.0)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), Point::scalar(v)))
        .collect();
    Witness {
        instance: "euclidean:n=1".into(),
        assignment,
        eps: 0.5,
        lhs: Point::scalar(4.25),
        rhs: Point::scalar(4.5),
        gap: 0.25,
    }
}

/// The identities of the calculus, as `(name, lhs, rhs)`, all over leaves
/// drawn from `x, u, v, w, y`.
pub fn standard_identities() -> Vec<(&'static str, Tree, Tree)> {
    let (x, u, v, w, y) = (leaf("x"), leaf("u"), leaf("v"), leaf("w"), leaf("y"));
    let xu = o(x.clone(), u.clone());
    vec![
        (
            "difference undoes sum",
            delta_tree(x.clone(), u.clone(), sigma_tree(x.clone(), u.clone(), y.clone())),
            y.clone(),
        ),
        (
            "sum undoes difference",
            sigma_tree(x.clone(), u.clone(), delta_tree(x.clone(), u.clone(), v.clone())),
            v.clone(),
        ),
        (
            "difference as shifted sum",
            delta_tree(x.clone(), u.clone(), v.clone()),
            sigma_tree(xu.clone(), inv_tree(x.clone(), u.clone()), v.clone()),
        ),
        (
            "inverse as difference",
            inv_tree(x.clone(), u.clone()),
            delta_tree(x.clone(), u.clone(), x.clone()),
        ),
        (
            "shifted involution",
            inv_tree(xu.clone(), inv_tree(x.clone(), u.clone())),
            u.clone(),
        ),
        (
            "shifted associativity",
            sigma_tree(x.clone(), sigma_tree(x.clone(), u.clone(), v.clone()), w.clone()),
            sigma_tree(x.clone(), u.clone(), sigma_tree(xu, v.clone(), w.clone())),
        ),
        ("sum with the base", sigma_tree(x.clone(), x.clone(), u.clone()), u),
    ]
}

/// Plain associativity of `Σ^x`, which fails at finite scale.
pub fn plain_associativity() -> (Tree, Tree) {
    let (x, u, v, w) = (leaf("x"), leaf("u"), leaf("v"), leaf("w"));
    (
        sigma_tree(x.clone(), sigma_tree(x.clone(), u.clone(), v.clone()), w.clone()),
        sigma_tree(x.clone(), u, sigma_tree(x, v, w)),
    )
}

/// Plain involutivity `inv^x(inv^x(u)) = u`, which fails at finite scale.
///
/// The right side is written `(b x (o x u))`, whose normal form is `u`, so
/// that both sides mention the same leaves.
pub fn plain_involutivity() -> (Tree, Tree) {
    let (x, u) = (leaf("x"), leaf("u"));
    (inv_tree(x.clone(), inv_tree(x.clone(), u.clone())), b(x.clone(), o(x, u)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{euclidean, group_to_ds, heisenberg};

    fn t(s: &str) -> Tree {
        parse_tree(s).unwrap()
    }

    fn assign(pairs: &[(&str, &[f64])]) -> BTreeMap<String, Point> {
        pairs.iter().map(|(k, v)| (k.to_string(), Point(v.to_vec()))).collect()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(t("(o x u)"), o(leaf("x"), leaf("u")));
        assert_eq!(t("(b (o x u) (o x v))"), build_delta("x", "u", "v"));
        assert_eq!(t("  ( b\n x\t(o x u) ) "), b(leaf("x"), o(leaf("x"), leaf("u"))));
    }

    #[test]
    fn parse_errors_carry_offsets() {
        match parse_tree("(o x") {
            Err(Error::Syntax { offset, message }) => {
                assert_eq!(offset, 4);
                assert!(message.contains("end of input"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        match parse_tree("(q x u)") {
            Err(Error::Syntax { offset, message }) => {
                assert_eq!(offset, 1);
                assert!(message.contains("unknown color token `q`"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_tree("(o x u) y"), Err(Error::Syntax { offset: 8, .. })));
        assert!(matches!(parse_tree(""), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse_tree("(o x u v)"), Err(Error::Syntax { offset: 7, .. })));
        assert!(matches!(parse_tree(")"), Err(Error::Syntax { offset: 0, .. })));
    }

    #[test]
    fn render_examples() {
        assert_eq!(render_tree(&leaf("x")), "x");
        assert_eq!(render_tree(&o(leaf("x"), leaf("x"))), "(o x x)");
        assert_eq!(render_tree(&build_delta("x", "u", "v")), "(b (o x u) (o x v))");
        assert_eq!(render_tree(&build_sigma("x", "u", "v")), "(b x (o (o x u) v))");
        assert_eq!(render_tree(&build_inv("x", "u")), "(b (o x u) x)");
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&t("(b x (o x u))")), leaf("u"));
        assert_eq!(normalize(&t("(o x x)")), leaf("x"));
        assert_eq!(normalize(&build_sigma("x", "x", "v")), leaf("v"));
        assert_eq!(normalize(&t("(o x u)")), t("(o x u)"));
        let prop3a = t("(b (o x u) (o x (b x (o (o x u) y))))");
        assert_eq!(normalize_with_steps(&prop3a), (leaf("y"), 2));
    }

    #[test]
    fn cancel_requires_opposite_colors() {
        assert_eq!(normalize(&t("(o x (o x u))")), t("(o x (o x u))"));
        assert_eq!(normalize(&t("(o y (b x u))")), t("(o y (b x u))"));
    }

    #[test]
    fn standard_identities_are_proved_quickly() {
        let models = vec![euclidean(1).unwrap()];
        for (name, lhs, rhs) in standard_identities() {
            let v = equivalent(&lhs, &rhs, &models, 10, 1).unwrap();
            assert_eq!(v.status, Status::Proved, "{name}");
            assert!(v.witness.is_none());
            assert!(v.rewrite_steps <= 200);
        }
    }

    #[test]
    fn shifted_associativity_normal_form() {
        let (_, lhs, rhs) = standard_identities().into_iter().find(|(n, ..)| *n == "shifted associativity").unwrap();
        let nf = t("(b x (o (o (o x u) v) w))");
        assert_eq!(normalize(&lhs), nf);
        assert_eq!(normalize(&rhs), nf);
    }

    #[test]
    fn reflexivity() {
        let a = t("(o x u)");
        let v = equivalent(&a, &a, &[], 0, 0).unwrap();
        assert_eq!(v.status, Status::Proved);
        assert_eq!(v.rewrite_steps, 0);
    }

    #[test]
    fn associativity_refuted_with_reproducible_witness() {
        let (lhs, rhs) = plain_associativity();
        let models = vec![euclidean(1).unwrap()];
        let v = equivalent(&lhs, &rhs, &models, 50, 9).unwrap();
        assert_eq!(v.status, Status::Refuted);
        let w = v.witness.unwrap();
        assert!(w.gap > REFUTATION_THRESHOLD);
        let again = evaluate_witness(&lhs, &rhs, models[0].as_ref(), &w).unwrap();
        assert_eq!(again.gap, w.gap);

        let bundled = euclidean_associativity_witness();
        let got = evaluate_witness(&lhs, &rhs, models[0].as_ref(), &bundled).unwrap();
        assert_eq!(got.lhs, Point::scalar(4.25));
        assert_eq!(got.rhs, Point::scalar(4.5));
        assert_eq!(got.gap, 0.25);
    }

    #[test]
    fn leaf_sets_must_match_unless_proved() {
        let res = equivalent(&t("(o x u)"), &t("(o x v)"), &[], 1, 0);
        assert!(matches!(res, Err(Error::LeafSetMismatch { .. })));
        // (4.5) against the bare leaf: the normal forms agree
        let shifted = inv_tree(t("(o x u)"), build_inv("x", "u"));
        assert_eq!(equivalent(&shifted, &leaf("u"), &[], 1, 0).unwrap().status, Status::Proved);
    }

    #[test]
    fn involutivity_refuted() {
        let (lhs, rhs) = plain_involutivity();
        let v = equivalent(&lhs, &rhs, &[euclidean(2).unwrap()], 20, 3).unwrap();
        assert_eq!(v.status, Status::Refuted);
    }

    #[test]
    fn evaluation_examples() {
        let e1 = euclidean(1).unwrap();
        let a = assign(&[("x", &[0.0]), ("u", &[1.0]), ("v", &[2.0])]);
        let half = Scale::of(0.5);
        assert_eq!(eval_tree(&t("(o x u)"), e1.as_ref(), &a, half).unwrap(), Point::scalar(0.5));
        assert_eq!(eval_tree(&build_delta("x", "u", "v"), e1.as_ref(), &a, half).unwrap(), Point::scalar(1.5));
        let h = group_to_ds(heisenberg(1).unwrap());
        let a = assign(&[("x", &[1.0, 0.0, 0.0]), ("u", &[1.0, 1.0, 0.0])]);
        assert_eq!(eval_tree(&t("(o x u)"), h.as_ref(), &a, half).unwrap(), Point(vec![1.0, 0.5, 0.5]));
        assert!(matches!(
            eval_tree(&t("(o x z)"), e1.as_ref(), &assign(&[("x", &[0.0])]), half),
            Err(Error::UnassignedLeaf(s)) if s == "z"
        ));
    }

    #[test]
    fn domain_errors_name_the_subtree() {
        let ds = crate::structure::restrict(euclidean(1).unwrap(), 2.0, 4.0).unwrap();
        let a = assign(&[("x", &[0.0]), ("u", &[3.0])]);
        match eval_tree(&t("(b x (o x u))"), ds.as_ref(), &a, Scale::of(0.5)) {
            Err(Error::TreeEvaluation { subtree, .. }) => assert_eq!(subtree, "(o x u)"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn assignment_round_trip() {
        let a = assign(&[("x", &[1.0, 0.0, -2.5]), ("u", &[0.25])]);
        let s = format_assignment(&a);
        assert_eq!(s, "u=0.25;x=1;0;-2.5");
        assert_eq!(parse_assignment(&s).unwrap(), a);
        assert!(parse_assignment("1;x=2").is_err());
        assert_eq!(euclidean_associativity_witness().csv_row(), "euclidean:n=1,0.5,u=1;v=2;w=3;x=0,0.25");
    }

    #[test]
    fn rewrite_at_follows_paths() {
        let tr = t("(o y (b x (o x u)))");
        let red = redex_positions(&tr);
        assert_eq!(red, vec![(vec![true], Rule::Cancel)]);
        assert_eq!(rewrite_at(&tr, &[true], Rule::Cancel).unwrap(), t("(o y u)"));
        assert_eq!(tr.at(&[true, true]).unwrap(), &t("(o x u)"));
        assert!(is_normal(&t("(o y u)")));
    }

    #[test]
    fn random_order_agrees_with_innermost() {
        let mut r = rng(11);
        let symbols = ["x", "u", "v", "w"];
        let mut fired = 0;
        for _ in 0..1000 {
            let tr = random_tree(&mut r, 15, &symbols);
            assert!(tr.size() <= 15);
            let (nf, steps) = normalize_with_steps(&tr);
            let (other, other_steps) = normalize_by(&tr, |n| r.gen_range(0..n));
            assert_eq!(nf, other, "{tr}");
            assert!(is_normal(&nf));
            assert!(steps < tr.size() && other_steps < tr.size());
            fired += other_steps;
        }
        assert!(fired > 300, "generator should produce redexes, got {fired}");
    }
}
