use crate::graph::{End, NodeId, NodeKind, Port, ZGraph};

use super::forward::{apply, in_ports, kind_of, mismatch, pr, require, require_link};
use super::splice::{apply_replacement, thread_pairs, Chain, Replacement};
use super::{Body, ClickCase, Inverse, RewriteError};

/// Undoes a move given the [`Inverse`] returned by [`super::apply_traced`].
pub fn reverse(g: &ZGraph, inv: &Inverse) -> Result<ZGraph, RewriteError> {
    match inv {
        Inverse::Unclick { zipper, residual, case } => unclick(g, *zipper, *residual, *case),
        Inverse::Unzip { arity, chains } => unzip(g, *arity, chains),
        Inverse::Forward(m) => apply(g, m),
        Inverse::UnfanIn { chains } => unfan_in(g, chains),
        Inverse::Undist { plus: true, copies, fanouts, .. } => undist_plus(g, *copies, fanouts),
        Inverse::Undist { plus: false, copies, fanouts, fanins } => {
            undist_minus(g, *copies, fanouts, fanins)
        }
        Inverse::UnpruneZP { caps } => unprune_zp(g, caps),
        Inverse::UnpruneZM { arity, body, vars } => unprune_zm(g, *arity, body, vars),
        Inverse::UnpruneFO { chains, out } => unprune_fo(g, chains, *out),
        Inverse::UnpruneFI { caps } => unprune_fi(g, *caps),
        Inverse::UnpruneArrow { label } => unprune_arrow(g, label),
    }
}

fn zipper_arity(g: &ZGraph, z: NodeId) -> Result<u32, RewriteError> {
    match kind_of(g, z)? {
        NodeKind::Zipper(n) => Ok(n),
        k => Err(mismatch(format!("{z} is {k}, expected a zipper"))),
    }
}

fn unclick(
    g: &ZGraph,
    z: NodeId,
    residual: Option<NodeId>,
    case: ClickCase,
) -> Result<ZGraph, RewriteError> {
    let k = zipper_arity(g, z)?;
    let mut r = Replacement::default();
    let (n, m) = match (case, residual) {
        (ClickCase::Equal, None) => (k, k),
        (ClickCase::PlusLonger, Some(res)) => match kind_of(g, res)? {
            NodeKind::HalfZipperPlus(extra) => {
                require_link(g, pr(z, Port::ZeroPrime), pr(res, Port::Zero))?;
                (k, k + extra)
            }
            other => return Err(mismatch(format!("residual is {other}"))),
        },
        (ClickCase::MinusLonger, Some(res)) => match kind_of(g, res)? {
            NodeKind::HalfZipperMinus(extra) => {
                require_link(g, pr(res, Port::ZeroPrime), pr(z, Port::Zero))?;
                (k + extra, k)
            }
            other => return Err(mismatch(format!("residual is {other}"))),
        },
        _ => return Err(mismatch("residual does not fit the click case")),
    };
    r.delete.push(z);
    let zm = r.node(NodeKind::HalfZipperMinus(n));
    let zp = r.node(NodeKind::HalfZipperPlus(m));
    r.wire((zm, Port::ZeroPrime), (zp, Port::Zero));
    for i in 1..=k {
        r.attach(pr(z, Port::Var(i)), zm, Port::Var(i));
        r.attach(pr(z, Port::Arg(i)), zp, Port::Arg(i));
    }
    match (case, residual) {
        (ClickCase::PlusLonger, Some(res)) => {
            r.delete.push(res);
            r.drop(pr(z, Port::ZeroPrime));
            r.drop(pr(res, Port::Zero));
            r.attach(pr(z, Port::Zero), zm, Port::Zero);
            for j in 1..=m - k {
                r.attach(pr(res, Port::Arg(j)), zp, Port::Arg(k + j));
            }
            r.attach(pr(res, Port::ZeroPrime), zp, Port::ZeroPrime);
        }
        (ClickCase::MinusLonger, Some(res)) => {
            r.delete.push(res);
            r.drop(pr(res, Port::ZeroPrime));
            r.drop(pr(z, Port::Zero));
            r.attach(pr(res, Port::Zero), zm, Port::Zero);
            for j in 1..=n - k {
                r.attach(pr(res, Port::Var(j)), zm, Port::Var(k + j));
            }
            r.attach(pr(z, Port::ZeroPrime), zp, Port::ZeroPrime);
        }
        _ => {
            r.attach(pr(z, Port::Zero), zm, Port::Zero);
            r.attach(pr(z, Port::ZeroPrime), zp, Port::ZeroPrime);
        }
    }
    Ok(apply_replacement(g, &r)?.graph)
}

fn unzip(g: &ZGraph, arity: u32, chains: &[Chain]) -> Result<ZGraph, RewriteError> {
    if arity == 0 {
        return Err(mismatch("zipper arity must be positive"));
    }
    let mut out = g.clone();
    let z = out.add_node(NodeKind::Zipper(arity));
    let mut pairs = vec![(pr(z, Port::Zero), pr(z, Port::ZeroPrime))];
    pairs.extend((1..=arity).map(|i| (pr(z, Port::Arg(i)), pr(z, Port::Var(i)))));
    thread_pairs(&mut out, &pairs, chains)?;
    Ok(out)
}

fn unfan_in(g: &ZGraph, chains: &[Chain]) -> Result<ZGraph, RewriteError> {
    let mut out = g.clone();
    let fi = out.add_node(NodeKind::FanIn);
    let fo = out.add_node(NodeKind::FanOut);
    out.connect(pr(fi, Port::ZeroPrime), pr(fo, Port::Zero));
    let pairs = [
        (pr(fi, Port::Arg(1)), pr(fo, Port::Var(2))),
        (pr(fi, Port::Arg(2)), pr(fo, Port::Var(1))),
    ];
    thread_pairs(&mut out, &pairs, chains)?;
    Ok(out)
}

fn undist_plus(g: &ZGraph, [c1, c2]: [NodeId; 2], fans: &[NodeId]) -> Result<ZGraph, RewriteError> {
    let kind = kind_of(g, c1)?;
    let NodeKind::HalfZipperPlus(_) = kind else {
        return Err(mismatch(format!("{c1} is not a ZP copy")));
    };
    require(g, c2, kind)?;
    let ports = in_ports(kind);
    if fans.len() != ports.len() {
        return Err(mismatch("one fanout per in port expected"));
    }
    let mut r = Replacement { delete: vec![c1, c2], ..Default::default() };
    let p = r.node(kind);
    let top = r.node(NodeKind::FanOut);
    r.wire((p, Port::ZeroPrime), (top, Port::Zero));
    r.attach(pr(c1, Port::ZeroPrime), top, Port::Var(1));
    r.attach(pr(c2, Port::ZeroPrime), top, Port::Var(2));
    for (&f, &q) in fans.iter().zip(&ports) {
        require(g, f, NodeKind::FanOut)?;
        require_link(g, pr(f, Port::Var(1)), pr(c1, q))?;
        require_link(g, pr(f, Port::Var(2)), pr(c2, q))?;
        r.delete.push(f);
        r.attach(pr(f, Port::Zero), p, q);
        for (a, b) in [(pr(f, Port::Var(1)), pr(c1, q)), (pr(f, Port::Var(2)), pr(c2, q))] {
            r.drop(a);
            r.drop(b);
        }
    }
    Ok(apply_replacement(g, &r)?.graph)
}

fn undist_minus(
    g: &ZGraph,
    [c1, c2]: [NodeId; 2],
    fans: &[NodeId],
    fins: &[NodeId],
) -> Result<ZGraph, RewriteError> {
    let kind = kind_of(g, c1)?;
    let NodeKind::HalfZipperMinus(n) = kind else {
        return Err(mismatch(format!("{c1} is not a ZM copy")));
    };
    require(g, c2, kind)?;
    let [f0] = fans else {
        return Err(mismatch("one fanout expected"));
    };
    if fins.len() != n as usize {
        return Err(mismatch("one fanin per variable expected"));
    }
    require(g, *f0, NodeKind::FanOut)?;
    require_link(g, pr(*f0, Port::Var(1)), pr(c1, Port::Zero))?;
    require_link(g, pr(*f0, Port::Var(2)), pr(c2, Port::Zero))?;
    let mut r = Replacement { delete: vec![c1, c2, *f0], ..Default::default() };
    let zm = r.node(kind);
    let top = r.node(NodeKind::FanOut);
    r.wire((zm, Port::ZeroPrime), (top, Port::Zero));
    r.attach(pr(c1, Port::ZeroPrime), top, Port::Var(1));
    r.attach(pr(c2, Port::ZeroPrime), top, Port::Var(2));
    r.attach(pr(*f0, Port::Zero), zm, Port::Zero);
    for (a, b) in [(Port::Var(1), c1), (Port::Var(2), c2)] {
        r.drop(pr(*f0, a));
        r.drop(pr(b, Port::Zero));
    }
    for (i, &fi) in (1..=n).zip(fins) {
        require(g, fi, NodeKind::FanIn)?;
        require_link(g, pr(c2, Port::Var(i)), pr(fi, Port::Arg(1)))?;
        require_link(g, pr(c1, Port::Var(i)), pr(fi, Port::Arg(2)))?;
        r.delete.push(fi);
        r.attach(pr(fi, Port::ZeroPrime), zm, Port::Var(i));
        for p in [pr(c2, Port::Var(i)), pr(fi, Port::Arg(1)), pr(c1, Port::Var(i)), pr(fi, Port::Arg(2))] {
            r.drop(p);
        }
    }
    Ok(apply_replacement(g, &r)?.graph)
}

fn unprune_zp(g: &ZGraph, caps: &[NodeId]) -> Result<ZGraph, RewriteError> {
    if caps.len() < 2 {
        return Err(mismatch("a ZP needs at least two in ports"));
    }
    let kind = NodeKind::HalfZipperPlus(caps.len() as u32 - 1);
    let mut r = Replacement { delete: caps.to_vec(), ..Default::default() };
    let p = r.node(kind);
    let t = r.node(NodeKind::Termination);
    r.wire((p, Port::ZeroPrime), (t, Port::Zero));
    for (&c, q) in caps.iter().zip(in_ports(kind)) {
        require(g, c, NodeKind::Termination)?;
        r.attach(pr(c, Port::Zero), p, q);
    }
    Ok(apply_replacement(g, &r)?.graph)
}

fn unprune_zm(g: &ZGraph, arity: u32, body: &Body, vars: &[Option<String>]) -> Result<ZGraph, RewriteError> {
    if arity == 0 || vars.len() != arity as usize {
        return Err(mismatch("variable list does not fit the arity"));
    }
    let self_var = match body {
        Body::SelfVar(i) => Some(*i),
        Body::Cap(_) => None,
    };
    for (i, v) in (1..=arity).zip(vars) {
        if v.is_none() != (Some(i) == self_var) {
            return Err(mismatch("exactly the self-closing variable may be unlabelled"));
        }
    }
    let mut out = g.clone();
    let z = out.add_node(NodeKind::HalfZipperMinus(arity));
    let t = out.add_node(NodeKind::Termination);
    out.connect(pr(z, Port::ZeroPrime), pr(t, Port::Zero));
    match body {
        Body::Cap(c) => {
            require(g, *c, NodeKind::Termination)?;
            let aid = g.arrow_at(pr(*c, Port::Zero)).ok_or_else(|| mismatch("cap without arrow"))?;
            let a = out.remove_arrow(aid).expect("indexed");
            out.remove_node(*c);
            out.add_arrow(a.tail, End::Port(pr(z, Port::Zero)));
        }
        Body::SelfVar(i) => {
            if !out.take_loops(1) {
                return Err(mismatch("no loop to reopen"));
            }
            out.connect(pr(z, Port::Var(*i)), pr(z, Port::Zero));
        }
    }
    for (i, v) in (1..=arity).zip(vars) {
        let Some(label) = v else { continue };
        let aid = out
            .arrows()
            .find(|(_, a)| a.tail == End::Free(label.clone()))
            .map(|(id, _)| id)
            .ok_or_else(|| mismatch(format!("no free tail {label:?}")))?;
        let a = out.remove_arrow(aid).expect("found");
        out.add_arrow(End::Port(pr(z, Port::Var(i))), a.head);
    }
    Ok(out)
}

fn unprune_fo(g: &ZGraph, chains: &[Chain], k: u32) -> Result<ZGraph, RewriteError> {
    if !(1..=2).contains(&k) {
        return Err(mismatch("fanout out port must be 1 or 2"));
    }
    let mut out = g.clone();
    let f = out.add_node(NodeKind::FanOut);
    let t = out.add_node(NodeKind::Termination);
    out.connect(pr(f, Port::Var(k)), pr(t, Port::Zero));
    thread_pairs(&mut out, &[(pr(f, Port::Zero), pr(f, Port::Var(3 - k)))], chains)?;
    Ok(out)
}

fn unprune_fi(g: &ZGraph, [c1, c2]: [NodeId; 2]) -> Result<ZGraph, RewriteError> {
    require(g, c1, NodeKind::Termination)?;
    require(g, c2, NodeKind::Termination)?;
    let mut r = Replacement { delete: vec![c1, c2], ..Default::default() };
    let fi = r.node(NodeKind::FanIn);
    let t = r.node(NodeKind::Termination);
    r.attach(pr(c1, Port::Zero), fi, Port::Arg(1));
    r.attach(pr(c2, Port::Zero), fi, Port::Arg(2));
    r.wire((fi, Port::ZeroPrime), (t, Port::Zero));
    Ok(apply_replacement(g, &r)?.graph)
}

fn unprune_arrow(g: &ZGraph, label: &str) -> Result<ZGraph, RewriteError> {
    if g.free_labels().contains(label) {
        return Err(mismatch(format!("label {label:?} already in use")));
    }
    let mut out = g.clone();
    if !out.take_loops(1) {
        return Err(mismatch("no loop to reopen"));
    }
    let t = out.add_node(NodeKind::Termination);
    out.add_arrow(End::Free(label.to_string()), End::Port(pr(t, Port::Zero)));
    Ok(out)
}
