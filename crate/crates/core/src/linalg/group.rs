use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use super::smith::{kernel_basis, smith_diagonal, solve_linear};
use super::IntMatrix;
use crate::{Error, Result};

/// A finitely generated abelian group presented as `Z^generators / im(relations)`.
///
/// Relations are columns: `relations` has one row per generator and one
/// column per relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FgAbGroup {
    generators: usize,
    relations: IntMatrix,
    invariant_factors: Vec<BigInt>,
    free_rank: usize,
}

impl FgAbGroup {
    pub fn new(generators: usize, relations: IntMatrix) -> Result<Self> {
        if relations.rows() != generators {
            return Err(Error::DimensionMismatch(format!(
                "relation matrix has {} rows for {} generators",
                relations.rows(),
                generators
            )));
        }
        let diag = smith_diagonal(&relations);
        let free_rank = generators - diag.len();
        let invariant_factors = diag.into_iter().filter(|d| !d.is_one()).collect();
        Ok(FgAbGroup {
            generators,
            relations,
            invariant_factors,
            free_rank,
        })
    }

    pub fn free(rank: usize) -> Self {
        Self::new(rank, IntMatrix::zeros(rank, 0)).expect("shapes agree")
    }

    pub fn zero() -> Self {
        Self::free(0)
    }

    /// `Z/n`; `n = 0` gives `Z`.
    pub fn cyclic(n: u64) -> Self {
        if n == 0 {
            return Self::free(1);
        }
        Self::new(1, IntMatrix::from_rows(&[[n as i64]])).expect("shapes agree")
    }

    /// Canonical presentation `Z/f_1 ⊕ … ⊕ Z/f_k ⊕ Z^free_rank`.
    pub fn from_invariants(factors: &[BigInt], free_rank: usize) -> Self {
        let k = factors.len();
        let mut rel = IntMatrix::zeros(k + free_rank, k);
        for (i, f) in factors.iter().enumerate() {
            rel.set(i, i, f.clone());
        }
        Self::new(k + free_rank, rel).expect("shapes agree")
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    /// Invariant factors greater than one, each dividing the next.
    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty() && self.free_rank == 0
    }

    pub fn is_isomorphic(&self, other: &FgAbGroup) -> bool {
        self.invariant_factors == other.invariant_factors && self.free_rank == other.free_rank
    }

    /// Whether the columns of `v` (generator coordinates) all vanish in the group.
    pub fn elements_are_zero(&self, v: &IntMatrix) -> Result<bool> {
        Ok(solve_linear(&self.relations, v)?.is_some())
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|d| format!("Z/{d}"))
            .collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// A homomorphism of presented groups, given by its action on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupMorphism {
    source: FgAbGroup,
    target: FgAbGroup,
    matrix: IntMatrix,
}

impl GroupMorphism {
    pub fn new(source: FgAbGroup, target: FgAbGroup, matrix: IntMatrix) -> Result<Self> {
        if matrix.shape() != (target.generator_count(), source.generator_count()) {
            return Err(Error::DimensionMismatch(format!(
                "morphism matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.generator_count(),
                source.generator_count()
            )));
        }
        Ok(GroupMorphism {
            source,
            target,
            matrix,
        })
    }

    pub fn identity(group: &FgAbGroup) -> Self {
        let n = group.generator_count();
        GroupMorphism {
            source: group.clone(),
            target: group.clone(),
            matrix: IntMatrix::identity(n),
        }
    }

    pub fn zero(source: &FgAbGroup, target: &FgAbGroup) -> Self {
        GroupMorphism {
            source: source.clone(),
            target: target.clone(),
            matrix: IntMatrix::zeros(target.generator_count(), source.generator_count()),
        }
    }

    pub fn source(&self) -> &FgAbGroup {
        &self.source
    }

    pub fn target(&self) -> &FgAbGroup {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// `matrix · relations_source` lies in the image of `relations_target`.
    pub fn is_well_defined(&self) -> bool {
        let image = &self.matrix * self.source.relations();
        matches!(solve_linear(self.target.relations(), &image), Ok(Some(_)))
    }

    /// Equality of presented-group morphisms: matrices agree modulo target relations.
    pub fn equals(&self, other: &GroupMorphism) -> Result<bool> {
        if self.matrix.shape() != other.matrix.shape() {
            return Err(Error::DimensionMismatch(
                "comparing morphisms of different shapes".into(),
            ));
        }
        self.target
            .elements_are_zero(&(&self.matrix - &other.matrix))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.target.elements_are_zero(&self.matrix), Ok(true))
    }

    pub fn is_surjective(&self) -> bool {
        // coker f = Z^target / (im M + im R_target)
        let stacked = IntMatrix::hstack(
            self.target.generator_count(),
            &[&self.matrix, self.target.relations()],
        );
        FgAbGroup::new(self.target.generator_count(), stacked)
            .expect("shapes agree")
            .is_trivial()
    }

    pub fn is_injective(&self) -> bool {
        // preimages of target relations: project ker [M | R_t] onto the source block
        let n_src = self.source.generator_count();
        let stacked = IntMatrix::hstack(
            self.target.generator_count(),
            &[&self.matrix, self.target.relations()],
        );
        let kernel = kernel_basis(&stacked);
        let preimages = kernel.select_rows(0..n_src);
        matches!(self.source.elements_are_zero(&preimages), Ok(true))
    }

    pub fn is_iso(&self) -> Result<bool> {
        if !self.is_well_defined() {
            return Err(Error::IllDefinedMorphism);
        }
        Ok(self.is_surjective() && self.is_injective())
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GroupMorphism) -> Result<GroupMorphism> {
        GroupMorphism::new(
            self.source.clone(),
            other.target.clone(),
            &other.matrix * &self.matrix,
        )
    }
}

pub fn morphism_is_well_defined(f: &GroupMorphism) -> bool {
    f.is_well_defined()
}

pub fn morphism_is_iso(f: &GroupMorphism) -> Result<bool> {
    f.is_iso()
}

/// The group presented by `a`: one generator per row, one relation per column.
pub fn cokernel_group(a: &IntMatrix) -> FgAbGroup {
    FgAbGroup::new(a.rows(), a.clone()).expect("shapes agree")
}
