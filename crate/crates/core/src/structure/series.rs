//! Derived series, lower central series, and centrality checks over any
//! finite group given concretely. Two carriers implement [`FiniteGroup`]:
//! [`super::perm::PermGroup`] and [`TableGroup`], the group read off a
//! completed regular coset table (elements are coset numbers, products are
//! table walks). Subgroups are materialized as element sets, which is the
//! right trade at the scale of the quotients studied here: the groups can
//! be large, but their derived subgroups stay small.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;

use super::StructureError;
use crate::coset::{CosetError, CosetTable};

/// Order-preserving dedup that also drops the identity.
pub(crate) fn dedup_nontrivial<E: Ord + Clone>(items: Vec<E>, identity: &E) -> Vec<E> {
    let mut seen: BTreeSet<E> = BTreeSet::new();
    let mut out = Vec::new();
    for item in items {
        if &item != identity && seen.insert(item.clone()) {
            out.push(item);
        }
    }
    out
}

/// A finite group with computable products, given by finitely many
/// generators over an ordered element type.
pub trait FiniteGroup {
    type Elem: Clone + Ord;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn generators(&self) -> Vec<Self::Elem>;
    fn order(&self) -> BigInt;
    /// Size of the underlying carrier (permutation degree, coset count),
    /// used for resource guards.
    fn carrier_size(&self) -> usize;

    fn commutator(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(&self.mul(&self.inv(a), &self.inv(b)), &self.mul(a, b))
    }
}

/// Resource guards for structure computations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureLimits {
    /// Largest permitted carrier (permutation degree / coset count).
    pub max_degree: usize,
    /// Largest permitted materialized subgroup.
    pub max_subgroup: usize,
    /// Largest permitted group order for a full report.
    pub max_order: BigInt,
}

impl Default for StructureLimits {
    fn default() -> StructureLimits {
        StructureLimits {
            max_degree: 2_000_000,
            max_subgroup: 2_000_000,
            max_order: BigInt::from(1_000_000_000u64),
        }
    }
}

/// A subgroup held as a generating set plus its full element set.
#[derive(Clone, Debug)]
pub struct SubgroupData<E: Ord> {
    pub gens: Vec<E>,
    pub elements: BTreeSet<E>,
}

impl<E: Ord + Clone> SubgroupData<E> {
    pub fn trivial(identity: E) -> SubgroupData<E> {
        let mut elements = BTreeSet::new();
        elements.insert(identity);
        SubgroupData {
            gens: Vec::new(),
            elements,
        }
    }

    pub fn order(&self) -> BigInt {
        BigInt::from(self.elements.len())
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn contains(&self, e: &E) -> bool {
        self.elements.contains(e)
    }
}

/// Closure of a generating set: breadth-first orbit of the identity under
/// right multiplication by the generators and their inverses.
pub fn subgroup_closure<G: FiniteGroup>(
    g: &G,
    gens: &[G::Elem],
    limits: &StructureLimits,
) -> Result<SubgroupData<G::Elem>, StructureError> {
    let id = g.identity();
    let mut mult: Vec<G::Elem> = Vec::with_capacity(2 * gens.len());
    for s in gens {
        mult.push(s.clone());
        mult.push(g.inv(s));
    }
    let mult = dedup_nontrivial(mult, &id);

    let mut elements: BTreeSet<G::Elem> = BTreeSet::new();
    elements.insert(id.clone());
    let mut frontier: Vec<G::Elem> = vec![id.clone()];
    while let Some(x) = frontier.pop() {
        for s in &mult {
            let y = g.mul(&x, s);
            if elements.insert(y.clone()) {
                if elements.len() > limits.max_subgroup {
                    return Err(StructureError::SubgroupLimitExceeded {
                        limit: limits.max_subgroup,
                    });
                }
                frontier.push(y);
            }
        }
    }
    Ok(SubgroupData {
        gens: dedup_nontrivial(gens.to_vec(), &id),
        elements,
    })
}

/// Smallest subgroup containing `seeds` and closed under conjugation by the
/// `conjugators` (the normal closure of the seeds in the group the
/// conjugators generate). Standard iteration: close, conjugate the
/// generating set, absorb anything new, repeat.
pub fn normal_closure_of<G: FiniteGroup>(
    g: &G,
    seeds: &[G::Elem],
    conjugators: &[G::Elem],
    limits: &StructureLimits,
) -> Result<SubgroupData<G::Elem>, StructureError> {
    let id = g.identity();
    let mut gens = dedup_nontrivial(seeds.to_vec(), &id);
    loop {
        let data = subgroup_closure(g, &gens, limits)?;
        let mut fresh: Vec<G::Elem> = Vec::new();
        for c in conjugators {
            let ci = g.inv(c);
            for s in &gens {
                for t in [
                    g.mul(&g.mul(&ci, s), c),
                    g.mul(&g.mul(c, s), &ci),
                ] {
                    if !data.contains(&t) {
                        fresh.push(t);
                    }
                }
            }
        }
        if fresh.is_empty() {
            return Ok(SubgroupData {
                gens,
                elements: data.elements,
            });
        }
        gens.extend(dedup_nontrivial(fresh, &id));
        gens = dedup_nontrivial(gens, &id);
    }
}

/// Derived subgroup `[H, H]` of the subgroup generated by `parent_gens`:
/// normal closure (in that subgroup) of the generator commutators.
pub fn derived_of<G: FiniteGroup>(
    g: &G,
    parent_gens: &[G::Elem],
    limits: &StructureLimits,
) -> Result<SubgroupData<G::Elem>, StructureError> {
    let mut seeds = Vec::new();
    for (i, a) in parent_gens.iter().enumerate() {
        for b in &parent_gens[i + 1..] {
            seeds.push(g.commutator(a, b));
        }
    }
    normal_closure_of(g, &seeds, parent_gens, limits)
}

fn all_commute<G: FiniteGroup>(g: &G, left: &[G::Elem], right: &[G::Elem]) -> bool {
    let id = g.identity();
    left.iter()
        .all(|a| right.iter().all(|b| g.commutator(a, b) == id))
}

/// Nilpotency class, or the observation that the lower central series
/// stalls above the trivial group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NilpotencyClass {
    Class(u32),
    NotNilpotent,
}

impl core::fmt::Display for NilpotencyClass {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            NilpotencyClass::Class(c) => write!(f, "{c}"),
            NilpotencyClass::NotNilpotent => write!(f, "not nilpotent"),
        }
    }
}

/// Nilpotency class of the subgroup generated by `h_gens`, via its lower
/// central series (each term the normal closure of `[term, H]`).
pub fn nilpotency_class<G: FiniteGroup>(
    g: &G,
    h: &SubgroupData<G::Elem>,
    limits: &StructureLimits,
) -> Result<NilpotencyClass, StructureError> {
    if h.is_trivial() {
        return Ok(NilpotencyClass::Class(0));
    }
    let mut term = h.clone();
    let mut class = 1u32;
    loop {
        let mut seeds = Vec::new();
        for x in &term.gens {
            for y in &h.gens {
                seeds.push(g.commutator(x, y));
            }
        }
        let next = normal_closure_of(g, &seeds, &h.gens, limits)?;
        if next.is_trivial() {
            return Ok(NilpotencyClass::Class(class));
        }
        if next.elements.len() == term.elements.len() {
            return Ok(NilpotencyClass::NotNilpotent);
        }
        term = next;
        class += 1;
    }
}

/// Computed structure facts for one finite group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureReport {
    pub order: BigInt,
    /// Orders down the derived series, starting at the whole group. Ends at
    /// 1 exactly for solvable groups; a repeated final entry is suppressed,
    /// so a non-solvable group's list ends above 1.
    pub derived_series_orders: Vec<BigInt>,
    pub is_derived_abelian: bool,
    pub nilpotency_class_of_derived: NilpotencyClass,
    pub second_derived_central_in_derived: bool,
    pub second_derived_central_in_whole: bool,
}

/// Full derived-series / centrality report.
pub fn structure_report<G: FiniteGroup>(
    g: &G,
    limits: &StructureLimits,
) -> Result<StructureReport, StructureError> {
    if g.carrier_size() > limits.max_degree {
        return Err(StructureError::DegreeLimitExceeded {
            degree: g.carrier_size(),
            limit: limits.max_degree,
        });
    }
    let order = g.order();
    if order > limits.max_order {
        return Err(StructureError::OrderLimitExceeded);
    }

    let whole_gens = g.generators();
    let derived = derived_of(g, &whole_gens, limits)?;
    let second = derived_of(g, &derived.gens, limits)?;

    // Orders down the series until it reaches 1 or stalls (a stalled,
    // perfect term is not repeated in the list).
    let mut orders = vec![order.clone()];
    if derived.order() != order {
        orders.push(derived.order());
        if !derived.is_trivial() {
            let mut prev = derived.order();
            let mut cur = second.clone();
            loop {
                if cur.order() == prev {
                    break;
                }
                orders.push(cur.order());
                if cur.is_trivial() {
                    break;
                }
                prev = cur.order();
                cur = derived_of(g, &cur.gens, limits)?;
            }
        }
    }

    Ok(StructureReport {
        order,
        derived_series_orders: orders,
        is_derived_abelian: all_commute(g, &derived.gens, &derived.gens),
        nilpotency_class_of_derived: nilpotency_class(g, &derived, limits)?,
        second_derived_central_in_derived: all_commute(g, &second.gens, &derived.gens),
        second_derived_central_in_whole: all_commute(g, &second.gens, &whole_gens),
    })
}

/// The group defined by a completed regular coset table, with cosets as
/// elements. Coset `c` stands for the unique group element carrying coset 0
/// to `c`; products follow the table, guided by a breadth-first definition
/// forest (each non-base coset remembers one table edge leading back toward
/// the base).
pub struct TableGroup<'a> {
    table: &'a CosetTable,
    // (parent coset, column applied at the parent to reach this coset)
    forest: Vec<(u32, u32)>,
}

impl<'a> TableGroup<'a> {
    pub fn new(table: &'a CosetTable) -> Result<TableGroup<'a>, CosetError> {
        if !table.is_complete() {
            return Err(CosetError::Incomplete);
        }
        if !table.is_regular() {
            return Err(CosetError::NotRegular);
        }
        let n = table.coset_count();
        let mut forest = vec![(u32::MAX, u32::MAX); n];
        let mut queue = vec![0u32];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut head = 0;
        while head < queue.len() {
            let c = queue[head];
            head += 1;
            for col in 0..table.ncols() as u32 {
                let d = table.entry(c, col);
                if !seen[d as usize] {
                    seen[d as usize] = true;
                    forest[d as usize] = (c, col);
                    queue.push(d);
                }
            }
        }
        debug_assert!(seen.iter().all(|&s| s), "regular table must be connected");
        Ok(TableGroup { table, forest })
    }

    pub fn table(&self) -> &CosetTable {
        self.table
    }

    /// Columns which, applied in order at coset 0, reach `c`.
    fn path(&self, c: u32) -> Vec<u32> {
        let mut cols = Vec::new();
        let mut cur = c;
        while cur != 0 {
            let (parent, col) = self.forest[cur as usize];
            cols.push(col);
            cur = parent;
        }
        cols.reverse();
        cols
    }

    fn apply_path(&self, start: u32, cols: &[u32]) -> u32 {
        let mut c = start;
        for &col in cols {
            c = self.table.entry(c, col);
        }
        c
    }
}

impl FiniteGroup for TableGroup<'_> {
    type Elem = u32;

    fn identity(&self) -> u32 {
        0
    }

    fn mul(&self, a: &u32, b: &u32) -> u32 {
        self.apply_path(*a, &self.path(*b))
    }

    fn inv(&self, a: &u32) -> u32 {
        let mut cols = self.path(*a);
        cols.reverse();
        for col in cols.iter_mut() {
            *col ^= 1;
        }
        self.apply_path(0, &cols)
    }

    fn generators(&self) -> Vec<u32> {
        // Image of coset 0 under each generator column.
        (0..self.table.ncols() as u32)
            .step_by(2)
            .map(|col| self.table.entry(0, col))
            .collect()
    }

    fn order(&self) -> BigInt {
        BigInt::from(self.table.coset_count())
    }

    fn carrier_size(&self) -> usize {
        self.table.coset_count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset::{enumerate, EnumLimits, SubgroupSpec};
    use crate::structure::perm::{Perm, PermGroup};
    use crate::word::{GenSym, Presentation, Word};

    fn pres(gens: &[&str], relators: &[&str]) -> Presentation {
        Presentation::new(
            gens.iter().map(|g| GenSym::new(*g).unwrap()).collect(),
            relators.iter().map(|r| r.parse::<Word>().unwrap()).collect(),
        )
        .unwrap()
    }

    fn s3_table() -> crate::coset::CosetTable {
        let p = pres(&["r", "s"], &["r^3", "s^2", "r^1 s^1 r^1 s^1"]);
        enumerate(&p, &SubgroupSpec::trivial(), &EnumLimits::default()).unwrap()
    }

    #[test]
    fn table_group_multiplication_is_consistent() {
        let t = s3_table();
        let g = TableGroup::new(&t).unwrap();
        let id = g.identity();
        let elems: Vec<u32> = (0..6).collect();
        for &a in &elems {
            assert_eq!(g.mul(&a, &id), a);
            assert_eq!(g.mul(&id, &a), a);
            assert_eq!(g.mul(&a, &g.inv(&a)), id);
            for &b in &elems {
                // Regular action: left translation by a is a bijection.
                let c = g.mul(&a, &b);
                assert!(c < 6);
            }
        }
        // Associativity spot check.
        for &a in &elems {
            for &b in &elems {
                for &c in &elems {
                    assert_eq!(g.mul(&g.mul(&a, &b), &c), g.mul(&a, &g.mul(&b, &c)));
                }
            }
        }
    }

    #[test]
    fn structure_report_of_s3_from_table() {
        let t = s3_table();
        let g = TableGroup::new(&t).unwrap();
        let rep = structure_report(&g, &StructureLimits::default()).unwrap();
        assert_eq!(rep.order, BigInt::from(6));
        assert_eq!(
            rep.derived_series_orders,
            vec![BigInt::from(6), BigInt::from(3), BigInt::from(1)]
        );
        assert!(rep.is_derived_abelian);
        assert_eq!(rep.nilpotency_class_of_derived, NilpotencyClass::Class(1));
        assert!(rep.second_derived_central_in_derived);
        assert!(rep.second_derived_central_in_whole);
    }

    #[test]
    fn structure_report_of_s3_from_perms_agrees() {
        let r = Perm::from_cycles(3, &[&[0, 1, 2]]).unwrap();
        let s = Perm::from_cycles(3, &[&[0, 1]]).unwrap();
        let g = PermGroup::new(3, vec![r, s]).unwrap();
        let rep = structure_report(&g, &StructureLimits::default()).unwrap();
        assert_eq!(rep.order, BigInt::from(6));
        assert_eq!(
            rep.derived_series_orders,
            vec![BigInt::from(6), BigInt::from(3), BigInt::from(1)]
        );
        assert!(rep.is_derived_abelian);
    }

    #[test]
    fn structure_report_of_trivial_group() {
        let p = pres(&["x"], &["x^1"]);
        let t = enumerate(&p, &SubgroupSpec::trivial(), &EnumLimits::default()).unwrap();
        let g = TableGroup::new(&t).unwrap();
        let rep = structure_report(&g, &StructureLimits::default()).unwrap();
        assert_eq!(rep.order, BigInt::from(1));
        assert_eq!(rep.derived_series_orders, vec![BigInt::from(1)]);
        assert_eq!(rep.nilpotency_class_of_derived, NilpotencyClass::Class(0));
    }

    #[test]
    fn alternating_group_on_4_points() {
        let g = PermGroup::new(
            4,
            vec![
                Perm::from_cycles(4, &[&[0, 1, 2]]).unwrap(),
                Perm::from_cycles(4, &[&[0, 1], &[2, 3]]).unwrap(),
            ],
        )
        .unwrap();
        let rep = structure_report(&g, &StructureLimits::default()).unwrap();
        assert_eq!(rep.order, BigInt::from(12));
        assert_eq!(
            rep.derived_series_orders,
            vec![BigInt::from(12), BigInt::from(4), BigInt::from(1)]
        );
        assert!(rep.is_derived_abelian);
        assert_eq!(rep.nilpotency_class_of_derived, NilpotencyClass::Class(1));
    }

    #[test]
    fn perfect_group_series_stalls_above_one() {
        let a5 = PermGroup::new(
            5,
            vec![
                Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap(),
                Perm::from_cycles(5, &[&[0, 1, 2]]).unwrap(),
            ],
        )
        .unwrap();
        let rep = structure_report(&a5, &StructureLimits::default()).unwrap();
        assert_eq!(rep.derived_series_orders, vec![BigInt::from(60)]);
        assert!(!rep.is_derived_abelian);
        assert_eq!(rep.nilpotency_class_of_derived, NilpotencyClass::NotNilpotent);
    }

    #[test]
    fn dihedral_group_of_order_8_is_nilpotent_of_class_2() {
        // D4 as a permutation group; its nilpotency class is 2, while its
        // derived subgroup (order 2, central) has class 1.
        let r = Perm::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap();
        let s = Perm::from_cycles(4, &[&[1, 3]]).unwrap();
        let d4 = PermGroup::new(4, vec![r.clone(), s.clone()]).unwrap();
        let whole = subgroup_closure(&d4, &[r, s], &StructureLimits::default()).unwrap();
        assert_eq!(whole.order(), BigInt::from(8));
        assert_eq!(
            nilpotency_class(&d4, &whole, &StructureLimits::default()).unwrap(),
            NilpotencyClass::Class(2)
        );
        let rep = structure_report(&d4, &StructureLimits::default()).unwrap();
        assert_eq!(
            rep.derived_series_orders,
            vec![BigInt::from(8), BigInt::from(2), BigInt::from(1)]
        );
        assert_eq!(rep.nilpotency_class_of_derived, NilpotencyClass::Class(1));
        assert!(rep.second_derived_central_in_whole);
    }

    #[test]
    fn subgroup_closure_respects_limits() {
        let a5 = PermGroup::new(
            5,
            vec![
                Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap(),
                Perm::from_cycles(5, &[&[0, 1, 2]]).unwrap(),
            ],
        )
        .unwrap();
        let limits = StructureLimits {
            max_subgroup: 10,
            ..StructureLimits::default()
        };
        let gens = a5.gens().to_vec();
        assert!(matches!(
            subgroup_closure(&a5, &gens, &limits),
            Err(StructureError::SubgroupLimitExceeded { .. })
        ));
    }

    #[test]
    fn index_chain_multiplies_to_group_order() {
        // In the table group for S3: |<r>| * [G : <r>] = |G|.
        let t = s3_table();
        let g = TableGroup::new(&t).unwrap();
        let r = g.generators()[0];
        let sub = subgroup_closure(&g, &[r], &StructureLimits::default()).unwrap();
        assert_eq!(sub.order() * BigInt::from(2), g.order());
    }
}
