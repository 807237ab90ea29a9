use crate::error::{Error, Result};
use crate::path_algebra::AlgebraElement;
use crate::quiver::{Arrow, ArrowId, Quiver};
use crate::rational;

pub(crate) fn star(a: &ArrowId) -> ArrowId {
    ArrowId::new(format!("{a}*"))
}

/// Double quiver of an acyclic quiver together with one mesh relation per
/// non-isolated vertex `v`: the sum of `a a*` over arrows ending at `v`
/// minus the sum of `a* a` over arrows starting at `v` (products written
/// right-to-left).
pub fn build_preprojective(q: &Quiver) -> Result<(Quiver, Vec<AlgebraElement>)> {
    if !q.is_acyclic() {
        return Err(Error::NotAcyclic);
    }
    let mut arrows: Vec<Arrow> = q.arrows().to_vec();
    for a in q.arrows() {
        arrows.push(Arrow::new(star(&a.id), a.target, a.source));
    }
    let double = Quiver::new(q.vertices().iter().copied(), arrows)?;
    let mut relations = Vec::new();
    for &v in q.vertices() {
        let mut terms = Vec::new();
        for a in q.incoming(v) {
            terms.push((vec![star(&a.id), a.id.clone()], rational::int(1)));
        }
        for a in q.outgoing(v) {
            terms.push((vec![a.id.clone(), star(&a.id)], rational::int(-1)));
        }
        if terms.is_empty() {
            continue;
        }
        relations.push(AlgebraElement::new(&double, v, v, terms)?);
    }
    Ok((double, relations))
}
