//! Extending factor measures on logically independent sigma-algebras to
//! one probability on their join that keeps the factors independent.
//!
//! Cylinders (intersections of one member per algebra) form a semi-ring
//! and carry the product formula. The extension prices each join block as
//! the product of its factor block probabilities; logical independence
//! makes the join blocks correspond one-to-one with block choices, which
//! is what keeps that pricing additive and normalized.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::independence::{
    check_logical_independence, check_probabilistic_independence, IndependenceError,
    IndependenceVerdict, Witness,
};
use crate::measure::{EventProbability, MeasureError};
use crate::space::{EventSet, FiniteSpace, SigmaAlgebra};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtensionError {
    #[error("expected at least one factor")]
    EmptyFamily,
    #[error("sigma-algebra {index} is trivial")]
    TrivialAlgebra { index: usize },
    #[error("the factors live on different sample spaces")]
    SpaceMismatch,
    #[error("the sigma-algebras are not logically independent")]
    NotLogicallyIndependent { witness: Witness },
    #[error("cylinder entry refers to algebra {index}, but the family has {family_len}")]
    UnknownAlgebraIndex { index: usize, family_len: usize },
    #[error("cylinder entry for algebra {algebra} is not a member of that algebra")]
    NotAMember { algebra: usize },
    #[error("expected {expected} block probabilities, got {got}")]
    BlockCount { expected: usize, got: usize },
    #[error("block {block} has negative probability")]
    NegativeBlockProb { block: usize },
    #[error("block probabilities sum to {total}, not 1")]
    FactorNotProbability { total: BigRational },
    #[error("parts {first} and {second} overlap")]
    NotDisjoint { first: usize, second: usize },
    #[error("the union of the parts is not a cylinder")]
    UnionNotCylinder,
    #[error("the comparison measure lives on a different space")]
    MeasureMismatch,
    #[error("the comparison measure has total mass {total}, not 1")]
    NotAProbability { total: BigRational },
}

/// An intersection of one member per chosen algebra of a family.
///
/// Keys are algebra indices; an absent index contributes the whole
/// space. `Empty` is the empty set, which no entry map represents once
/// entries are nonempty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CylinderEvent {
    Empty,
    Cylinder(BTreeMap<usize, EventSet>),
}

impl CylinderEvent {
    /// The whole space: a cylinder with no constraints.
    pub fn full() -> Self {
        CylinderEvent::Cylinder(BTreeMap::new())
    }

    /// Builds a cylinder from `(algebra index, member)` pairs. Repeated
    /// indices intersect their members.
    pub fn of<I: IntoIterator<Item = (usize, EventSet)>>(entries: I) -> Self {
        let mut map = BTreeMap::new();
        for (i, e) in entries {
            map.entry(i)
                .and_modify(|cur: &mut EventSet| *cur = cur.intersection(&e))
                .or_insert(e);
        }
        CylinderEvent::Cylinder(map)
    }

    pub fn entries(&self) -> Option<&BTreeMap<usize, EventSet>> {
        match self {
            CylinderEvent::Empty => None,
            CylinderEvent::Cylinder(map) => Some(map),
        }
    }

    pub fn is_empty_set(&self) -> bool {
        matches!(self, CylinderEvent::Empty)
    }
}

/// A family of nontrivial sigma-algebras on one space, checked to be
/// logically independent on construction.
///
/// Pairwise independence is not enough for the constructions here, so
/// the whole family is checked at once; see the crossing-partitions test
/// below for a pairwise-independent family that fails jointly.
#[derive(Debug, Clone)]
pub struct IndependentFamily {
    algebras: Vec<SigmaAlgebra>,
    space: FiniteSpace,
}

impl IndependentFamily {
    pub fn new(algebras: Vec<SigmaAlgebra>) -> Result<Self, ExtensionError> {
        let space = algebras
            .first()
            .ok_or(ExtensionError::EmptyFamily)?
            .space()
            .clone();
        for (index, a) in algebras.iter().enumerate() {
            if !a.space().same_space(&space) {
                return Err(ExtensionError::SpaceMismatch);
            }
            if !a.is_nontrivial() {
                return Err(ExtensionError::TrivialAlgebra { index });
            }
        }
        if algebras.len() >= 2 {
            match check_logical_independence(&algebras) {
                Ok(v) if v.independent => {}
                Ok(v) => {
                    return Err(ExtensionError::NotLogicallyIndependent {
                        witness: v.witness.expect("failing verdicts carry a witness"),
                    })
                }
                Err(IndependenceError::SpaceMismatch) => return Err(ExtensionError::SpaceMismatch),
                Err(IndependenceError::TrivialAlgebra { index }) => {
                    return Err(ExtensionError::TrivialAlgebra { index })
                }
                Err(e) => unreachable!("family already validated: {e}"),
            }
        }
        Ok(IndependentFamily { algebras, space })
    }

    pub fn algebras(&self) -> &[SigmaAlgebra] {
        &self.algebras
    }

    pub fn len(&self) -> usize {
        self.algebras.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    fn check_entry(&self, index: usize, member: &EventSet) -> Result<(), ExtensionError> {
        if index >= self.algebras.len() {
            return Err(ExtensionError::UnknownAlgebraIndex {
                index,
                family_len: self.algebras.len(),
            });
        }
        if !self.algebras[index].contains(member) {
            return Err(ExtensionError::NotAMember { algebra: index });
        }
        Ok(())
    }

    /// The set of outcomes a cylinder describes.
    pub fn realize(&self, cylinder: &CylinderEvent) -> Result<EventSet, ExtensionError> {
        match cylinder {
            CylinderEvent::Empty => Ok(self.space.empty_event()),
            CylinderEvent::Cylinder(map) => {
                let mut meet = self.space.full_event();
                for (&i, e) in map {
                    self.check_entry(i, e)?;
                    meet = meet.intersection(e);
                }
                Ok(meet)
            }
        }
    }

    /// Canonical representative of a cylinder: whole-space entries are
    /// dropped and the empty set becomes `Empty`. Two cylinders over a
    /// logically independent family describe the same outcome set exactly
    /// when their canonical forms are equal.
    pub fn canonical_form(&self, cylinder: &CylinderEvent) -> Result<CylinderEvent, ExtensionError> {
        let map = match cylinder {
            CylinderEvent::Empty => return Ok(CylinderEvent::Empty),
            CylinderEvent::Cylinder(map) => map,
        };
        let mut out = BTreeMap::new();
        for (&i, e) in map {
            self.check_entry(i, e)?;
            if e.is_empty() {
                return Ok(CylinderEvent::Empty);
            }
            if !e.is_full() {
                out.insert(i, e.clone());
            }
        }
        // Nontrivial entries of an independent family always meet, so
        // this guard never fires for well-formed families.
        if self
            .realize(&CylinderEvent::Cylinder(out.clone()))?
            .is_empty()
        {
            return Ok(CylinderEvent::Empty);
        }
        Ok(CylinderEvent::Cylinder(out))
    }

    /// Writes `a \ b` as finitely many pairwise disjoint cylinders.
    ///
    /// With the entries of `b` listed as `B_{j_1}, .., B_{j_m}`, the
    /// difference telescopes into the terms
    /// `a ∩ B_{j_1} ∩ .. ∩ B_{j_{l-1}} ∩ complement(B_{j_l})`, one per
    /// `l`; each term is again a cylinder because members are closed
    /// under intersection and complement within their algebra.
    pub fn semiring_difference(
        &self,
        a: &CylinderEvent,
        b: &CylinderEvent,
    ) -> Result<Vec<CylinderEvent>, ExtensionError> {
        let a = self.canonical_form(a)?;
        let b = self.canonical_form(b)?;
        let (a_map, b_map) = match (&a, &b) {
            (CylinderEvent::Empty, _) => return Ok(vec![]),
            (_, CylinderEvent::Empty) => return Ok(vec![a]),
            (CylinderEvent::Cylinder(am), CylinderEvent::Cylinder(bm)) => (am, bm),
        };
        let b_entries: Vec<(usize, &EventSet)> = b_map.iter().map(|(&i, e)| (i, e)).collect();
        let mut parts = Vec::new();
        for l in 0..b_entries.len() {
            let mut term = a_map.clone();
            let mut insert = |i: usize, e: &EventSet| {
                term.entry(i)
                    .and_modify(|cur| *cur = cur.intersection(e))
                    .or_insert_with(|| e.clone());
            };
            for &(i, e) in &b_entries[..l] {
                insert(i, e);
            }
            let (i_l, e_l) = b_entries[l];
            insert(i_l, &e_l.complement());
            let canon = self.canonical_form(&CylinderEvent::Cylinder(term))?;
            if !canon.is_empty_set() {
                parts.push(canon);
            }
        }
        Ok(parts)
    }

    /// The only cylinder the union of `parts` can be: component-wise
    /// unions over the indices constrained in every part. Any index left
    /// unconstrained by some part is absorbed to the whole space.
    fn union_candidate(
        &self,
        parts: &[CylinderEvent],
    ) -> Result<CylinderEvent, ExtensionError> {
        let mut maps = Vec::new();
        for p in parts {
            match self.canonical_form(p)? {
                CylinderEvent::Empty => {}
                CylinderEvent::Cylinder(map) => maps.push(map),
            }
        }
        let Some(first) = maps.first() else {
            return Ok(CylinderEvent::Empty);
        };
        let common: Vec<usize> = first
            .keys()
            .copied()
            .filter(|i| maps.iter().all(|m| m.contains_key(i)))
            .collect();
        let mut out = BTreeMap::new();
        for i in common {
            let mut u = self.space.empty_event();
            for m in &maps {
                u = u.union(&m[&i]);
            }
            if !u.is_full() {
                out.insert(i, u);
            }
        }
        Ok(CylinderEvent::Cylinder(out))
    }

    /// Decides whether the union of the given cylinders is itself a
    /// cylinder, and if so produces its canonical representation.
    pub fn verify_union_representation(
        &self,
        parts: &[CylinderEvent],
    ) -> Result<UnionReport, ExtensionError> {
        let candidate = self.union_candidate(parts)?;
        let mut realized_union = self.space.empty_event();
        for p in parts {
            realized_union = realized_union.union(&self.realize(p)?);
        }
        let is_cylinder = self.realize(&candidate)? == realized_union;
        Ok(UnionReport {
            representation: is_cylinder.then(|| candidate.clone()),
            is_cylinder,
            candidate,
            realized_union,
        })
    }
}

/// Outcome of a union-representation check.
#[derive(Debug, Clone)]
pub struct UnionReport {
    pub is_cylinder: bool,
    /// Canonical representation of the union when it is a cylinder.
    pub representation: Option<CylinderEvent>,
    /// The component-wise union cylinder that was tested.
    pub candidate: CylinderEvent,
    pub realized_union: EventSet,
}

/// A probability on one sigma-algebra, given by one weight per block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorMeasure {
    algebra: SigmaAlgebra,
    block_probs: Vec<BigRational>,
}

impl FactorMeasure {
    pub fn new(
        algebra: SigmaAlgebra,
        block_probs: Vec<BigRational>,
    ) -> Result<Self, ExtensionError> {
        if block_probs.len() != algebra.block_count() {
            return Err(ExtensionError::BlockCount {
                expected: algebra.block_count(),
                got: block_probs.len(),
            });
        }
        if let Some(block) = block_probs.iter().position(|p| p < &BigRational::zero()) {
            return Err(ExtensionError::NegativeBlockProb { block });
        }
        let total: BigRational = block_probs.iter().sum();
        if !total.is_one() {
            return Err(ExtensionError::FactorNotProbability { total });
        }
        Ok(FactorMeasure { algebra, block_probs })
    }

    pub fn uniform(algebra: SigmaAlgebra) -> Self {
        let b = algebra.block_count();
        let w = BigRational::new(1.into(), (b as i64).into());
        FactorMeasure { algebra, block_probs: vec![w; b] }
    }

    pub fn algebra(&self) -> &SigmaAlgebra {
        &self.algebra
    }

    pub fn block_probs(&self) -> &[BigRational] {
        &self.block_probs
    }

    /// Probability of a member, summed over the blocks it contains.
    pub fn member_prob(&self, member: &EventSet) -> Result<BigRational, MeasureError> {
        if !member.space().same_space(self.algebra.space()) {
            return Err(MeasureError::SpaceMismatch);
        }
        if !self.algebra.contains(member) {
            return Err(MeasureError::NotMeasurable);
        }
        Ok(self
            .algebra
            .blocks()
            .iter()
            .zip(&self.block_probs)
            .filter(|(b, _)| b.is_subset(member))
            .map(|(_, p)| p)
            .sum())
    }
}

/// The independence-preserving extension of factor measures to the join.
///
/// Each join block is priced as the product of the factor probabilities
/// of the blocks it lies in.
#[derive(Debug, Clone)]
pub struct ExtensionMeasure {
    family: IndependentFamily,
    factors: Vec<FactorMeasure>,
    join: SigmaAlgebra,
    cell_probs: Vec<BigRational>,
}

impl ExtensionMeasure {
    pub fn extend(factors: Vec<FactorMeasure>) -> Result<Self, ExtensionError> {
        let family =
            IndependentFamily::new(factors.iter().map(|f| f.algebra().clone()).collect())?;
        let join = SigmaAlgebra::join(family.algebras()).expect("family is nonempty");
        let mut cell_probs = Vec::with_capacity(join.block_count());
        for cell in join.blocks() {
            let atom = cell.atom_indices().next().expect("blocks are nonempty");
            let mut p = BigRational::one();
            for f in &factors {
                p *= &f.block_probs()[f.algebra().block_of_atom(atom)];
            }
            cell_probs.push(p);
        }
        // Logical independence puts join cells in bijection with block
        // choices, so the cell masses are a full product grid.
        let total: BigRational = cell_probs.iter().sum();
        assert!(
            total.is_one(),
            "extension masses sum to {total}, not 1; the family bijection is broken"
        );
        Ok(ExtensionMeasure { family, factors, join, cell_probs })
    }

    pub fn family(&self) -> &IndependentFamily {
        &self.family
    }

    pub fn factors(&self) -> &[FactorMeasure] {
        &self.factors
    }

    pub fn join_algebra(&self) -> &SigmaAlgebra {
        &self.join
    }

    pub fn cell_probs(&self) -> &[BigRational] {
        &self.cell_probs
    }

    fn cell_mass_of(&self, event: &EventSet) -> BigRational {
        self.join
            .blocks()
            .iter()
            .zip(&self.cell_probs)
            .filter(|(c, _)| c.is_subset(event))
            .map(|(_, p)| p)
            .sum()
    }

    /// Exact probability of a cylinder.
    ///
    /// Computed two ways that must agree: the product of factor
    /// probabilities over the canonical entries, and the total mass of
    /// the join cells inside the realized set.
    pub fn cylinder_prob(&self, cylinder: &CylinderEvent) -> Result<BigRational, ExtensionError> {
        let canon = self.family.canonical_form(cylinder)?;
        let map = match &canon {
            CylinderEvent::Empty => return Ok(BigRational::zero()),
            CylinderEvent::Cylinder(map) => map,
        };
        let mut via_product = BigRational::one();
        for (&i, e) in map {
            via_product *= self.factors[i]
                .member_prob(e)
                .expect("canonical entries are members");
        }
        let via_cells = self.cell_mass_of(&self.family.realize(&canon)?);
        assert_eq!(
            via_product, via_cells,
            "product formula and join-cell mass disagree"
        );
        Ok(via_product)
    }

    /// Probability the extension assigns to a single factor's member,
    /// which the construction keeps equal to the factor's own price.
    pub fn factor_marginal(
        &self,
        factor: usize,
        member: &EventSet,
    ) -> Result<BigRational, ExtensionError> {
        self.cylinder_prob(&CylinderEvent::of([(factor, member.clone())]))
    }
}

impl EventProbability for ExtensionMeasure {
    fn space(&self) -> &FiniteSpace {
        self.family.space()
    }

    fn event_prob(&self, event: &EventSet) -> Result<BigRational, MeasureError> {
        if !event.space().same_space(self.family.space()) {
            return Err(MeasureError::SpaceMismatch);
        }
        if !self.join.contains(event) {
            return Err(MeasureError::NotMeasurable);
        }
        Ok(self.cell_mass_of(event))
    }

    fn total(&self) -> BigRational {
        BigRational::one()
    }
}

/// Outcome of a finite-additivity check over a disjoint cylinder family
/// whose union is again a cylinder.
#[derive(Debug, Clone)]
pub struct AdditivityReport {
    pub holds: bool,
    /// Canonical representation of the union.
    pub union_cylinder: CylinderEvent,
    pub union_prob: BigRational,
    /// Sum of the part probabilities.
    pub parts_sum: BigRational,
    /// Sum over the decomposition chains inside the union.
    pub chain_sum: BigRational,
    /// Number of chains inside the union.
    pub chain_count: u64,
    /// `(algebra index, cell count)` of the per-factor decompositions.
    pub factor_cells: Vec<(usize, usize)>,
    /// Every chain inside the union lies in exactly one part.
    pub chains_in_single_part: bool,
}

/// Checks `P(∪ parts) = Σ P(part)` for pairwise disjoint cylinders whose
/// union is a cylinder, by rebuilding both sides from a common grid.
///
/// Per constrained algebra the part entries are split into cells: maximal
/// unions of blocks lying in the same parts. One cell per algebra gives a
/// chain; chains partition the space, each part is exactly the union of
/// the chains it contains, and chains inside the union must belong to
/// exactly one part. Both the part sum and the union probability are then
/// compared against the chain sum.
pub fn verify_finite_additivity(
    extension: &ExtensionMeasure,
    parts: &[CylinderEvent],
) -> Result<AdditivityReport, ExtensionError> {
    let family = extension.family();
    let canon: Vec<CylinderEvent> = parts
        .iter()
        .map(|p| family.canonical_form(p))
        .collect::<Result<_, _>>()?;
    let realized: Vec<EventSet> = canon
        .iter()
        .map(|p| family.realize(p))
        .collect::<Result<_, _>>()?;
    for i in 0..realized.len() {
        for j in i + 1..realized.len() {
            if !realized[i].is_disjoint(&realized[j]) {
                return Err(ExtensionError::NotDisjoint { first: i, second: j });
            }
        }
    }

    let live: Vec<&BTreeMap<usize, EventSet>> =
        canon.iter().filter_map(CylinderEvent::entries).collect();
    let union_cylinder = family.union_candidate(&canon)?;
    let mut realized_union = family.space().empty_event();
    for r in &realized {
        realized_union = realized_union.union(r);
    }
    if family.realize(&union_cylinder)? != realized_union {
        return Err(ExtensionError::UnionNotCylinder);
    }

    let union_prob = extension.cylinder_prob(&union_cylinder)?;
    let mut parts_sum = BigRational::zero();
    for p in &canon {
        parts_sum += extension.cylinder_prob(p)?;
    }

    // Indices constrained by at least one live (nonempty) part.
    let appearing: BTreeSet<usize> = live.iter().flat_map(|m| m.keys().copied()).collect();

    // Cells per appearing algebra: blocks grouped by the pattern of parts
    // whose entry (whole space when unconstrained) contains them.
    struct FactorCells {
        algebra: usize,
        // (cell, membership pattern over live parts, cell probability)
        cells: Vec<(EventSet, Vec<bool>, BigRational)>,
    }
    let mut decompositions = Vec::new();
    for &h in &appearing {
        let algebra = &family.algebras()[h];
        let factor = &extension.factors()[h];
        let mut groups: HashMap<Vec<bool>, Vec<usize>> = HashMap::new();
        for (b, block) in algebra.blocks().iter().enumerate() {
            let pattern: Vec<bool> = live
                .iter()
                .map(|m| m.get(&h).is_none_or(|e| block.is_subset(e)))
                .collect();
            groups.entry(pattern).or_default().push(b);
        }
        let mut cells: Vec<(EventSet, Vec<bool>, BigRational)> = groups
            .into_iter()
            .map(|(pattern, blocks)| {
                let mut cell = family.space().empty_event();
                let mut prob = BigRational::zero();
                for b in blocks {
                    cell = cell.union(&algebra.blocks()[b]);
                    prob += &factor.block_probs()[b];
                }
                (cell, pattern, prob)
            })
            .collect();
        cells.sort_by_key(|(cell, _, _)| {
            cell.atom_indices().next().expect("cells are nonempty")
        });
        decompositions.push(FactorCells { algebra: h, cells });
    }

    // One cell per algebra is a chain; the parts containing it are the
    // intersection of the cell patterns. Disjointness already bounds
    // that count by one, so each chain either sits inside exactly one
    // part or misses the union entirely.
    let mut chain_sum = BigRational::zero();
    let mut chain_count: u64 = 0;
    let mut chains_in_single_part = true;
    let mut digits = vec![0usize; decompositions.len()];
    let mut exhausted = false;
    while !exhausted {
        let mut owners = vec![true; live.len()];
        let mut prob = BigRational::one();
        for (d, &t) in decompositions.iter().zip(&digits) {
            let (_, pattern, p) = &d.cells[t];
            for (o, &bit) in owners.iter_mut().zip(pattern) {
                *o &= bit;
            }
            prob *= p;
        }
        match owners.iter().filter(|o| **o).count() {
            // No owner: the chain lies outside the union.
            0 => {}
            1 => {
                chain_count += 1;
                chain_sum += prob;
            }
            // Two owners would mean two parts share the chain.
            _ => chains_in_single_part = false,
        }
        exhausted = true;
        for pos in (0..digits.len()).rev() {
            digits[pos] += 1;
            if digits[pos] < decompositions[pos].cells.len() {
                exhausted = false;
                break;
            }
            digits[pos] = 0;
        }
    }

    let holds = chains_in_single_part && union_prob == parts_sum && union_prob == chain_sum;
    Ok(AdditivityReport {
        holds,
        union_cylinder,
        union_prob,
        parts_sum,
        chain_sum,
        chain_count,
        factor_cells: decompositions
            .iter()
            .map(|d| (d.algebra, d.cells.len()))
            .collect(),
        chains_in_single_part,
    })
}

/// Outcome of comparing a candidate measure against an extension.
#[derive(Debug, Clone)]
pub struct UniquenessReport {
    /// The candidate equals the extension on every join cell.
    pub matches: bool,
    pub marginals_match: bool,
    /// First factor block where the candidate disagrees with a marginal.
    pub marginal_mismatch: Option<MarginalMismatch>,
    /// Whether the candidate makes the family independent.
    pub independence: IndependenceVerdict,
    pub cells_match: bool,
    /// First join cell where the masses differ: `(cell, extension, candidate)`.
    pub cell_mismatch: Option<(EventSet, BigRational, BigRational)>,
}

#[derive(Debug, Clone)]
pub struct MarginalMismatch {
    pub factor: usize,
    pub block: EventSet,
    pub expected: BigRational,
    pub got: BigRational,
}

/// Compares a candidate probability on the join against the extension.
///
/// A probability with the extension's factor marginals that keeps the
/// family independent must agree with the extension cell by cell; the
/// report shows which of the hypotheses a disagreeing candidate breaks.
pub fn verify_uniqueness(
    extension: &ExtensionMeasure,
    candidate: &dyn EventProbability,
) -> Result<UniquenessReport, ExtensionError> {
    let family = extension.family();
    if !candidate.space().same_space(family.space()) {
        return Err(ExtensionError::MeasureMismatch);
    }
    let total = candidate.total();
    if !total.is_one() {
        return Err(ExtensionError::NotAProbability { total });
    }
    let price = |e: &EventSet| {
        candidate
            .event_prob(e)
            .map_err(|_| ExtensionError::MeasureMismatch)
    };

    let mut marginal_mismatch = None;
    'factors: for (i, f) in extension.factors().iter().enumerate() {
        for (block, p) in f.algebra().blocks().iter().zip(f.block_probs()) {
            let got = price(block)?;
            if &got != p {
                marginal_mismatch = Some(MarginalMismatch {
                    factor: i,
                    block: block.clone(),
                    expected: p.clone(),
                    got,
                });
                break 'factors;
            }
        }
    }

    let independence = if family.len() >= 2 {
        check_probabilistic_independence(family.algebras(), candidate)
            .map_err(|_| ExtensionError::MeasureMismatch)?
    } else {
        IndependenceVerdict { independent: true, witness: None }
    };

    let mut cell_mismatch = None;
    for (cell, p) in extension
        .join_algebra()
        .blocks()
        .iter()
        .zip(extension.cell_probs())
    {
        let got = price(cell)?;
        if &got != p {
            cell_mismatch = Some((cell.clone(), p.clone(), got));
            break;
        }
    }

    let marginals_match = marginal_mismatch.is_none();
    let cells_match = cell_mismatch.is_none();
    Ok(UniquenessReport {
        matches: marginals_match && independence.independent && cells_match,
        marginals_match,
        marginal_mismatch,
        independence,
        cells_match,
        cell_mismatch,
    })
}
