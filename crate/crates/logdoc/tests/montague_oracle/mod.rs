//! Beta-reduction oracle for the composition check: lexical meanings are
//! type-lifted lambda terms in the classical style, every grammar rule
//! combines child meanings by functional application alone, and the result
//! is beta-reduced to normal form. Kept fully independent of the
//! unification-based composer it checks.

use std::cell::Cell;

use logdoc_core::chart::{Chart, EdgeId, EdgeRule};
use logdoc_core::term::{Atom, Term};
use logdoc_core::ResourceSet;

#[derive(Debug, Clone, PartialEq)]
enum L {
    Var(String),
    Const(String),
    Lam(String, Box<L>),
    App(Box<L>, Box<L>),
    And(Box<L>, Box<L>),
    Atom(String, Vec<L>),
    Nil,
}

fn lam(v: &str, b: L) -> L {
    L::Lam(v.to_string(), Box::new(b))
}

fn app(f: L, a: L) -> L {
    L::App(Box::new(f), Box::new(a))
}

fn app2(f: L, a: L, b: L) -> L {
    app(app(f, a), b)
}

fn and(a: L, b: L) -> L {
    L::And(Box::new(a), Box::new(b))
}

fn v(name: &str) -> L {
    L::Var(name.to_string())
}

fn free_in(name: &str, t: &L) -> bool {
    match t {
        L::Var(x) => x == name,
        L::Const(_) | L::Nil => false,
        L::Lam(x, b) => x != name && free_in(name, b),
        L::App(f, a) => free_in(name, f) || free_in(name, a),
        L::And(a, b) => free_in(name, a) || free_in(name, b),
        L::Atom(_, args) => args.iter().any(|a| free_in(name, a)),
    }
}

struct Fresh(Cell<u64>);

impl Fresh {
    fn next(&self, base: &str) -> String {
        self.0.set(self.0.get() + 1);
        format!("{base}{}", self.0.get())
    }
}

/// Capture-avoiding substitution.
fn subst(t: &L, name: &str, arg: &L, fresh: &Fresh) -> L {
    match t {
        L::Var(x) if x == name => arg.clone(),
        L::Var(_) | L::Const(_) | L::Nil => t.clone(),
        L::Lam(x, b) if x == name => t.clone(),
        L::Lam(x, b) => {
            if free_in(x, arg) {
                let renamed = fresh.next("r");
                let body = subst(b, x, &L::Var(renamed.clone()), fresh);
                L::Lam(renamed, Box::new(subst(&body, name, arg, fresh)))
            } else {
                L::Lam(x.clone(), Box::new(subst(b, name, arg, fresh)))
            }
        }
        L::App(f, a) => app(subst(f, name, arg, fresh), subst(a, name, arg, fresh)),
        L::And(a, b) => and(subst(a, name, arg, fresh), subst(b, name, arg, fresh)),
        L::Atom(p, args) => {
            L::Atom(p.clone(), args.iter().map(|a| subst(a, name, arg, fresh)).collect())
        }
    }
}

/// Normal-order reduction to beta-normal form.
fn reduce(t: &L, fresh: &Fresh, fuel: &mut u32) -> L {
    assert!(*fuel > 0, "oracle reduction ran out of fuel");
    *fuel -= 1;
    match t {
        L::App(f, a) => {
            let f = reduce(f, fresh, fuel);
            if let L::Lam(x, b) = f {
                let contracted = subst(&b, &x, a, fresh);
                reduce(&contracted, fresh, fuel)
            } else {
                app(f, reduce(a, fresh, fuel))
            }
        }
        L::Lam(x, b) => L::Lam(x.clone(), Box::new(reduce(b, fresh, fuel))),
        L::And(a, b) => and(reduce(a, fresh, fuel), reduce(b, fresh, fuel)),
        L::Atom(p, args) => {
            L::Atom(p.clone(), args.iter().map(|a| reduce(a, fresh, fuel)).collect())
        }
        other => other.clone(),
    }
}

fn flatten(t: &L, out: &mut Vec<Atom>) {
    match t {
        L::Nil => {}
        L::And(a, b) => {
            flatten(a, out);
            flatten(b, out);
        }
        L::Atom(p, args) => {
            let terms: Vec<Term> = args
                .iter()
                .map(|a| match a {
                    L::Var(x) => Term::Var(logdoc_core::Var::new(format!("O{x}"))),
                    L::Const(c) => Term::Const(c.clone()),
                    other => panic!("non-term atom argument in normal form: {other:?}"),
                })
                .collect();
            out.push(Atom::new(p.clone(), terms));
        }
        other => panic!("unexpected normal form: {other:?}"),
    }
}

/// Does this constituent denote a lifted individual (proper noun or an
/// individual-denoting noun like a weekday)?
fn is_individual(chart: &Chart, id: EdgeId) -> bool {
    let e = chart.edge(id);
    match &e.rule {
        EdgeRule::Lexical => {
            e.category == "pn" || e.features.get("indiv").map(String::as_str) == Some("yes")
        }
        EdgeRule::Rule(r) => match r.as_str() {
            "cnp_noun" | "np_cnp" | "np_pn" => is_individual(chart, e.children[0]),
            "np_det_cnp" => is_individual(chart, e.children[1]),
            _ => false,
        },
    }
}

fn lexical_meaning(chart: &Chart, id: EdgeId) -> L {
    let e = chart.edge(id);
    let lemma = e.head.clone();
    match e.category.as_str() {
        "pn" => lam("P", app(v("P"), L::Const(lemma))),
        "noun" if e.features.get("indiv").map(String::as_str) == Some("yes") => {
            lam("P", app(v("P"), L::Const(format!("{lemma}1"))))
        }
        "noun" => lam("x", L::Atom("object".into(), vec![L::Const(lemma), v("x")])),
        "adj" => lam("x", L::Atom("property".into(), vec![L::Const(lemma), v("x")])),
        "verb" if e.features.get("tr").map(String::as_str) == Some("ditr") => lam(
            "e",
            lam(
                "s",
                lam(
                    "g",
                    lam(
                        "o",
                        L::Atom(
                            "action".into(),
                            vec![L::Const(lemma), v("e"), v("s"), v("o"), v("g")],
                        ),
                    ),
                ),
            ),
        ),
        "verb" => lam(
            "e",
            lam(
                "s",
                lam(
                    "o",
                    L::Atom("eventuality".into(), vec![L::Const(lemma), v("e"), v("s"), v("o")]),
                ),
            ),
        ),
        "adv" => lam("e", L::Atom("manner".into(), vec![L::Const(lemma), v("e")])),
        "prep" => L::Const(lemma),
        "det" => lam("x", v("x")),
        other => panic!("oracle has no meaning for lexical category {other}"),
    }
}

/// A prepositional phrase is a Church pair of the preposition constant and
/// the lifted noun phrase: `λf. f(prep)(np)`.
fn pp_pair(prep: L, np: L) -> L {
    lam("f", app2(v("f"), prep, np))
}

/// Consumes a pp pair with a relation builder over (prep, referent).
fn pp_using(pp: L, relation: L) -> L {
    app(pp, relation)
}

fn meaning(chart: &Chart, id: EdgeId, fresh: &Fresh) -> L {
    let e = chart.edge(id);
    let rule = match &e.rule {
        EdgeRule::Lexical => return lexical_meaning(chart, id),
        EdgeRule::Rule(r) => r.clone(),
    };
    let kid = |k: usize| meaning(chart, e.children[k], fresh);
    match rule.as_str() {
        "np_pn" | "cnp_noun" => kid(0),
        "np_cnp" => {
            if is_individual(chart, e.children[0]) {
                kid(0)
            } else {
                let r = fresh.next("x");
                lam("P", and(app(kid(0), v(&r)), app(v("P"), v(&r))))
            }
        }
        "np_det_cnp" => {
            if is_individual(chart, e.children[1]) {
                kid(1)
            } else {
                let r = fresh.next("x");
                lam("P", and(app(kid(1), v(&r)), app(v("P"), v(&r))))
            }
        }
        "cnp_adj_cnp" => lam("x", and(app(kid(0), v("x")), app(kid(1), v("x")))),
        "cnp_compound" => {
            let m = fresh.next("m");
            lam(
                "x",
                and(
                    app(kid(1), v("x")),
                    and(
                        L::Atom("circumstance".into(), vec![L::Const("by_with_for".into()), v("x"), v(&m)]),
                        app(kid(0), v(&m)),
                    ),
                ),
            )
        }
        "cnp_verb_cnp" => {
            let ev = fresh.next("e");
            let ob = fresh.next("o");
            lam("a", and(app(kid(1), v("a")), app(app2(kid(0), v(&ev), v("a")), v(&ob))))
        }
        "gvp_cnp_verb" => {
            let ob = fresh.next("o");
            lam(
                "e",
                lam("a", and(app(app2(kid(1), v("e"), v("a")), v(&ob)), app(kid(0), v(&ob)))),
            )
        }
        "cnp_gvp_cnp" => {
            let ev = fresh.next("e");
            lam("a", and(app(kid(1), v("a")), app2(kid(0), v(&ev), v("a"))))
        }
        "gervp_verb_np" => lam(
            "e",
            lam("a", app(kid(1), lam("o", app(app2(kid(0), v("e"), v("a")), v("o"))))),
        ),
        "np_gervp" => {
            let ev = fresh.next("e");
            let ag = fresh.next("a");
            lam("P", and(app2(kid(0), v(&ev), v(&ag)), app(v("P"), v(&ev))))
        }
        "pp_prep_np" => pp_pair(kid(0), kid(1)),
        "vp_verb_np" => lam(
            "e",
            lam("s", app(kid(1), lam("o", app(app2(kid(0), v("e"), v("s")), v("o"))))),
        ),
        "vp_verb" => {
            let ob = fresh.next("o");
            lam("e", lam("s", app(app2(kid(0), v("e"), v("s")), v(&ob))))
        }
        "vp_verb_np_np" => lam(
            "e",
            lam(
                "s",
                app(
                    kid(1),
                    lam(
                        "g",
                        app(kid(2), lam("o", app2(app2(kid(0), v("e"), v("s")), v("g"), v("o")))),
                    ),
                ),
            ),
        ),
        "vp_vp_pp" => lam(
            "e",
            lam(
                "s",
                and(
                    app2(kid(0), v("e"), v("s")),
                    pp_using(
                        kid(1),
                        lam(
                            "p",
                            lam(
                                "q",
                                app(
                                    v("q"),
                                    lam("y", L::Atom("circumstance".into(), vec![v("p"), v("e"), v("y")])),
                                ),
                            ),
                        ),
                    ),
                ),
            ),
        ),
        "vp_vp_pp_time" | "vp_vp_pp_loc" => {
            let pred = if rule == "vp_vp_pp_time" { "time" } else { "location" };
            lam(
                "e",
                lam(
                    "s",
                    and(
                        app2(kid(0), v("e"), v("s")),
                        pp_using(
                            kid(1),
                            lam(
                                "p",
                                lam(
                                    "q",
                                    app(v("q"), lam("y", L::Atom(pred.into(), vec![v("y"), v("e")]))),
                                ),
                            ),
                        ),
                    ),
                ),
            )
        }
        "cnp_cnp_pp" => lam(
            "x",
            and(
                app(kid(0), v("x")),
                pp_using(
                    kid(1),
                    lam(
                        "p",
                        lam(
                            "q",
                            app(
                                v("q"),
                                lam("y", L::Atom("relationship".into(), vec![v("p"), v("x"), v("y")])),
                            ),
                        ),
                    ),
                ),
            ),
        ),
        "vp_adv_vp" => lam("e", lam("s", and(app2(kid(1), v("e"), v("s")), app(kid(0), v("e"))))),
        "vp_vp_adv" => lam("e", lam("s", and(app2(kid(0), v("e"), v("s")), app(kid(1), v("e"))))),
        "s_np_vp" => lam("e", app(kid(0), lam("s", app2(kid(1), v("e"), v("s"))))),
        "s_pp_s_time" | "s_pp_s_loc" | "s_pp_s" => {
            let relation = match rule.as_str() {
                "s_pp_s_time" => lam(
                    "p",
                    lam("q", app(v("q"), lam("y", L::Atom("time".into(), vec![v("y"), v("e")])))),
                ),
                "s_pp_s_loc" => lam(
                    "p",
                    lam("q", app(v("q"), lam("y", L::Atom("location".into(), vec![v("y"), v("e")])))),
                ),
                _ => lam(
                    "p",
                    lam(
                        "q",
                        app(v("q"), lam("y", L::Atom("circumstance".into(), vec![v("p"), v("e"), v("y")]))),
                    ),
                ),
            };
            lam("e", and(app(kid(1), v("e")), pp_using(kid(0), relation)))
        }
        other => panic!("oracle has no recipe for rule {other}"),
    }
}

/// Derives the logical form of an analysis by the classical route and
/// returns its atoms.
pub fn derive(chart: &Chart, root: EdgeId, _rs: &ResourceSet) -> Vec<Atom> {
    let fresh = Fresh(Cell::new(0));
    let m = meaning(chart, root, &fresh);
    let closed = match chart.edge(root).category.as_str() {
        "s" => app(m, v(&fresh.next("e"))),
        "np" => app(m, lam("zz", L::Nil)),
        "cnp" => app(m, v(&fresh.next("x"))),
        "gervp" => app2(m, v(&fresh.next("e")), v(&fresh.next("a"))),
        other => panic!("oracle cannot close a root of category {other}"),
    };
    let mut fuel = 100_000;
    let normal = reduce(&closed, &fresh, &mut fuel);
    let mut out = Vec::new();
    flatten(&normal, &mut out);
    out
}
