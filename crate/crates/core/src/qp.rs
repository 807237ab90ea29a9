//! Quivers with potential: premutation, reduction and DWZ mutation, plus the
//! Jacobi-finiteness and rigidity tests built on truncated quotients.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::path_algebra::{truncated_quotient_dimension, AlgebraElement, CycleClass, DimensionResult, Potential, TruncatedIdeal};
use crate::quiver::{Arrow, ArrowId, Quiver, Vertex};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Qp {
    pub quiver: Quiver,
    pub potential: Potential,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rigidity {
    CertifiedRigid,
    /// A cycle class that is not cyclically equivalent to anything in the
    /// Jacobian ideal.
    NotRigidWitness(CycleClass),
    UnknownAtBound { bound: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReductionReport {
    /// Pairs `(a, b)` whose quadratic term `a b` was split off.
    pub eliminated: Vec<(ArrowId, ArrowId)>,
    /// Substitutions in the order they were applied.
    pub substitutions: Vec<(ArrowId, AlgebraElement)>,
    /// Some product exceeded the truncation order and was dropped.
    pub truncation_lost: bool,
}

/// Where an arrow of a premutated quiver comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Origin {
    Kept(ArrowId),
    Reversed { arrow: ArrowId, incoming: bool },
    Composite { incoming: ArrowId, outgoing: ArrowId },
}

type Subst = BTreeMap<ArrowId, Vec<(Vec<ArrowId>, Rational)>>;

fn fresh(used: &mut BTreeSet<ArrowId>, base: String) -> ArrowId {
    let mut name = base;
    while used.contains(&ArrowId::new(name.clone())) {
        name.push('\'');
    }
    let id = ArrowId::new(name);
    used.insert(id.clone());
    id
}

impl Qp {
    pub fn new(quiver: Quiver, potential: Potential) -> Result<Self> {
        potential.validate(&quiver)?;
        Ok(Qp { quiver, potential })
    }

    /// `(Q, 0)` with the default truncation.
    pub fn trivial(quiver: Quiver) -> Self {
        Qp { quiver, potential: Potential::zero(crate::DEFAULT_TRUNCATION) }
    }

    pub fn renumbered(&self) -> Qp {
        let (quiver, map) = self.quiver.renumbered();
        Qp { quiver, potential: self.potential.rename(&map) }
    }

    fn check_mutable_at(&self, i: Vertex) -> Result<()> {
        if !self.quiver.has_vertex(i) {
            return Err(Error::UnknownVertex(i));
        }
        if self.quiver.has_loop_at(i) {
            return Err(Error::LoopAtVertex(i));
        }
        if self.quiver.has_two_cycle_at(i) {
            return Err(Error::TwoCycleAtVertex(i));
        }
        Ok(())
    }

    /// Premutation at `i`: composites through `i`, reversal of the arrows at
    /// `i`, and the potential `[W] + Δ`.
    pub fn premutate(&self, i: Vertex) -> Result<Qp> {
        Ok(self.premutate_traced(i)?.0)
    }

    pub(crate) fn premutate_traced(&self, i: Vertex) -> Result<(Qp, BTreeMap<ArrowId, Origin>)> {
        self.check_mutable_at(i)?;
        let q = &self.quiver;
        let incoming: Vec<&Arrow> = q.incoming(i).collect();
        let outgoing: Vec<&Arrow> = q.outgoing(i).collect();
        let mut used: BTreeSet<ArrowId> = q.arrows().iter().map(|a| a.id.clone()).collect();
        let mut origins = BTreeMap::new();
        let mut arrows = Vec::new();
        for a in q.arrows() {
            if a.source != i && a.target != i {
                arrows.push(a.clone());
                origins.insert(a.id.clone(), Origin::Kept(a.id.clone()));
            }
        }
        let mut composite: BTreeMap<(ArrowId, ArrowId), ArrowId> = BTreeMap::new();
        for a in &incoming {
            for b in &outgoing {
                let id = fresh(&mut used, format!("[{}|{}]", b.id, a.id));
                arrows.push(Arrow { id: id.clone(), source: a.source, target: b.target });
                origins.insert(id.clone(), Origin::Composite { incoming: a.id.clone(), outgoing: b.id.clone() });
                composite.insert((a.id.clone(), b.id.clone()), id);
            }
        }
        let mut star = BTreeMap::new();
        for (list, is_in) in [(&incoming, true), (&outgoing, false)] {
            for a in list.iter() {
                let id = fresh(&mut used, format!("{}*", a.id));
                arrows.push(Arrow { id: id.clone(), source: a.target, target: a.source });
                origins.insert(id.clone(), Origin::Reversed { arrow: a.id.clone(), incoming: is_in });
                star.insert(a.id.clone(), id);
            }
        }
        let quiver = Quiver::new(q.vertices().iter().copied(), arrows)?;

        let mut w = Potential::zero(self.potential.truncation());
        for (class, c) in self.potential.terms() {
            let cyc = class.arrows();
            // rotate so the cycle does not start at i; then no pair through i wraps around
            let start = (0..cyc.len())
                .find(|&k| q.arrow(&cyc[k]).unwrap().source != i)
                .ok_or(Error::LoopAtVertex(i))?;
            let rot = class.rotated(start);
            let mut out = Vec::with_capacity(rot.len());
            let mut k = 0;
            while k < rot.len() {
                let a = q.arrow(&rot[k]).unwrap();
                if a.target == i {
                    let b = &rot[k + 1];
                    out.push(composite[&(rot[k].clone(), b.clone())].clone());
                    k += 2;
                } else {
                    out.push(rot[k].clone());
                    k += 1;
                }
            }
            w.add(CycleClass::new(out), c.clone());
        }
        for a in &incoming {
            for b in &outgoing {
                let cyc = vec![star[&a.id].clone(), composite[&(a.id.clone(), b.id.clone())].clone(), star[&b.id].clone()];
                w.add(CycleClass::new(cyc), rational::one());
            }
        }
        Ok((Qp { quiver, potential: w }, origins))
    }

    /// Splits off the trivial part of the potential, truncating at `n`.
    pub fn reduce(&self, n: usize) -> Result<(Qp, ReductionReport)> {
        let q = &self.quiver;
        let mut w = self.potential.clone().with_truncation(n);
        let mut report = ReductionReport { truncation_lost: w.was_truncated(), ..Default::default() };
        let mut pivots: Vec<(ArrowId, ArrowId, Rational)> = Vec::new();
        let mut pivot_arrows: BTreeSet<ArrowId> = BTreeSet::new();

        let apply = |w: &mut Potential, report: &mut ReductionReport, subst: Subst| {
            let (next, lost) = w.substitute(&subst);
            *w = next;
            report.truncation_lost |= lost;
            for (x, alts) in subst {
                let arrow = q.arrow(&x).unwrap();
                let mut e = AlgebraElement::zero(arrow.source, arrow.target);
                for (p, c) in alts {
                    e.add(p, c);
                }
                report.substitutions.push((x, e));
            }
        };

        // linear part: make each pivot pair appear in exactly one quadratic term
        loop {
            let pivot = w.terms().iter().find_map(|(class, c)| {
                let ids = class.arrows();
                let free = ids.len() == 2 && ids[0] != ids[1] && !ids.iter().any(|x| pivot_arrows.contains(x));
                let proper = free && !q.arrow(&ids[0]).unwrap().is_loop();
                proper.then(|| (ids[0].clone(), ids[1].clone(), c.clone()))
            });
            let Some((a, b, lambda)) = pivot else { break };
            let pivot_class = CycleClass::new(vec![a.clone(), b.clone()]);
            let partners = |w: &Potential, x: &ArrowId| -> Vec<(ArrowId, Rational)> {
                w.terms()
                    .iter()
                    .filter(|(class, _)| class.len() == 2 && **class != pivot_class && class.contains(x))
                    .map(|(class, c)| {
                        let ids = class.arrows();
                        let other = if ids[0] == *x { &ids[1] } else { &ids[0] };
                        (other.clone(), c.clone())
                    })
                    .collect()
            };
            for (target, partner_of) in [(&b, &a), (&a, &b)] {
                let others = partners(&w, partner_of);
                if others.is_empty() {
                    continue;
                }
                let mut alts = vec![(vec![target.clone()], rational::one())];
                for (o, mu) in others {
                    alts.push((vec![o], -(mu / &lambda)));
                }
                apply(&mut w, &mut report, BTreeMap::from([(target.clone(), alts)]));
            }
            pivot_arrows.insert(a.clone());
            pivot_arrows.insert(b.clone());
            pivots.push((a, b, lambda));
        }

        // nonlinear part: push every other occurrence of a pivot arrow to
        // ever higher length until it falls off the truncation
        let mut side: BTreeMap<ArrowId, (usize, bool)> = BTreeMap::new();
        for (k, (a, b, _)) in pivots.iter().enumerate() {
            side.insert(a.clone(), (k, true));
            side.insert(b.clone(), (k, false));
        }
        let quadratic: BTreeSet<CycleClass> = pivots.iter().map(|(a, b, _)| CycleClass::new(vec![a.clone(), b.clone()])).collect();
        let mut passes = 0;
        loop {
            let bad: Vec<(CycleClass, Rational)> = w
                .terms()
                .iter()
                .filter(|(class, _)| !quadratic.contains(*class) && class.arrows().iter().any(|x| side.contains_key(x)))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            let Some(len) = bad.iter().map(|(c, _)| c.len()).min() else { break };
            passes += 1;
            if passes > 2 * n {
                return Err(Error::TruncationOverflow(format!("reduction did not settle within {} passes", 2 * n)));
            }
            let mut subst: Subst = BTreeMap::new();
            for (class, c) in bad.iter().filter(|(c, _)| c.len() == len) {
                let ids = class.arrows();
                let pos = ids
                    .iter()
                    .position(|x| matches!(side.get(x), Some((_, false))))
                    .or_else(|| ids.iter().position(|x| side.contains_key(x)))
                    .unwrap();
                let (k, on_a) = side[&ids[pos]];
                let (a, b, lambda) = &pivots[k];
                let rest = class.rotated(pos)[1..].to_vec();
                // t = rest·b  =>  a -= (c/λ) rest ;  t = a·rest  =>  b -= (c/λ) rest
                let target = if on_a { b } else { a };
                subst
                    .entry(target.clone())
                    .or_insert_with(|| vec![(vec![target.clone()], rational::one())])
                    .push((rest, -(c / lambda)));
            }
            apply(&mut w, &mut report, subst);
        }

        let mut out = Potential::zero(n);
        for (class, c) in w.terms() {
            if !quadratic.contains(class) {
                out.add(class.clone(), c.clone());
            }
        }
        if w.was_truncated() || report.truncation_lost {
            out.mark_truncated();
        }
        let quiver = q.with_arrows(|x| !pivot_arrows.contains(&x.id));
        report.eliminated = pivots.into_iter().map(|(a, b, _)| (a, b)).collect();
        let reduced = Qp { quiver, potential: out };
        debug_assert!(reduced.potential.validate(&reduced.quiver).is_ok());
        Ok((reduced, report))
    }

    /// DWZ mutation: premutation followed by reduction at truncation `n`.
    pub fn dwz_mutate(&self, i: Vertex, n: usize) -> Result<Qp> {
        Ok(self.premutate(i)?.reduce(n)?.0)
    }

    /// The cyclic derivatives `∂_a W`, zero ones omitted.
    pub fn jacobian_generators(&self) -> Result<Vec<AlgebraElement>> {
        let mut gens = Vec::new();
        for a in self.quiver.arrows() {
            let d = self.potential.cyclic_derivative(&self.quiver, &a.id)?;
            if !d.is_zero() {
                gens.push(d);
            }
        }
        Ok(gens)
    }

    pub fn jacobi_finite(&self, bound: usize) -> Result<DimensionResult> {
        truncated_quotient_dimension(&self.quiver, &self.jacobian_generators()?, bound)
    }

    /// Rigidity test through the truncation at `bound`: a verdict other
    /// than `UnknownAtBound` requires the Jacobi-finite certificate at the
    /// same bound.
    pub fn is_rigid(&self, bound: usize) -> Result<Rigidity> {
        if bound < 2 {
            return Err(Error::BoundTooSmall { bound, order: 2 });
        }
        let gens = self.jacobian_generators()?;
        let order = gens.iter().filter_map(AlgebraElement::order).max().unwrap_or(0);
        if bound < order {
            return Ok(Rigidity::UnknownAtBound { bound });
        }
        let ideal = TruncatedIdeal::build(&self.quiver, &gens, bound)?;
        let dims = ideal.quotient_dims();
        if dims[bound] != dims[bound - 1] {
            return Ok(Rigidity::UnknownAtBound { bound });
        }
        Ok(match ideal.cyclic_cokernel().into_iter().next() {
            None => Rigidity::CertifiedRigid,
            Some(witness) => Rigidity::NotRigidWitness(witness),
        })
    }
}
