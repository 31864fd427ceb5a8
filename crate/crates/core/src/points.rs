//! Domain types: point sets, preference directions, ranked results.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::scalar::{from_f64, Scalar};

/// An immutable set of points with non-negative coordinates.
///
/// Every point carries a stable integer id. Ids of a freshly built set are
/// `0..n-1`; subset operations keep the original ids, so membership between
/// a ground set and its subsets is always judged by id.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet<S: Scalar = f64> {
    dims: usize,
    coords: Vec<S>, // row-major, n * dims
    ids: Vec<usize>,
}

impl<S: Scalar> PointSet<S> {
    /// Builds a point set from coordinate rows, assigning ids `0..n-1`.
    pub fn from_rows(dims: usize, rows: Vec<Vec<S>>) -> Result<Self> {
        let ids = (0..rows.len()).collect();
        Self::from_rows_with_ids(dims, rows, ids)
    }

    /// Builds a point set with explicit ids (must be unique).
    pub fn from_rows_with_ids(dims: usize, rows: Vec<Vec<S>>, ids: Vec<usize>) -> Result<Self> {
        if dims == 0 {
            return Err(Error::InvalidParameter("dims must be positive".into()));
        }
        if rows.len() != ids.len() {
            return Err(Error::InvalidParameter(format!(
                "{} rows but {} ids",
                rows.len(),
                ids.len()
            )));
        }
        let mut seen = HashSet::with_capacity(ids.len());
        for &id in &ids {
            if !seen.insert(id) {
                return Err(Error::DuplicateId { id });
            }
        }
        let mut coords = Vec::with_capacity(rows.len() * dims);
        for (index, row) in rows.iter().enumerate() {
            if row.len() != dims {
                return Err(Error::DimensionMismatch {
                    expected: dims,
                    got: row.len(),
                });
            }
            for (coord, &v) in row.iter().enumerate() {
                if !(v.is_finite() && v >= S::zero()) {
                    return Err(Error::InvalidCoordinate {
                        index,
                        coord,
                        value: v.to_f64().unwrap_or(f64::NAN),
                    });
                }
                coords.push(v);
            }
        }
        Ok(Self { dims, coords, ids })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Coordinates of the point at row `index`.
    pub fn point(&self, index: usize) -> &[S] {
        &self.coords[index * self.dims..(index + 1) * self.dims]
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn id_at(&self, index: usize) -> usize {
        self.ids[index]
    }

    /// Coordinates of the point with the given id, if present.
    pub fn by_id(&self, id: usize) -> Option<&[S]> {
        let index = self.ids.iter().position(|&i| i == id)?;
        Some(self.point(index))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &[S])> + '_ {
        self.ids
            .iter()
            .enumerate()
            .map(move |(index, &id)| (id, self.point(index)))
    }

    /// Subset with exactly the given ids, in ascending id order.
    pub fn subset(&self, ids: &[usize]) -> Result<Self> {
        let mut wanted: Vec<usize> = ids.to_vec();
        wanted.sort_unstable();
        wanted.dedup();
        let mut rows = Vec::with_capacity(wanted.len());
        for &id in &wanted {
            let p = self.by_id(id).ok_or(Error::NotSubset { id })?;
            rows.push(p.to_vec());
        }
        Self::from_rows_with_ids(self.dims, rows, wanted)
    }

    /// True when every id of `self` appears in `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        let theirs: HashSet<usize> = other.ids.iter().copied().collect();
        self.ids.iter().all(|id| theirs.contains(id))
    }

    /// Checks the subset-by-id relation, reporting the first stray id.
    pub fn ensure_subset_of(&self, other: &Self) -> Result<()> {
        let theirs: HashSet<usize> = other.ids.iter().copied().collect();
        match self.ids.iter().find(|id| !theirs.contains(id)) {
            Some(&id) => Err(Error::NotSubset { id }),
            None => Ok(()),
        }
    }
}

/// A preference direction in the closed positive orthant.
#[derive(Debug, Clone, PartialEq)]
pub struct Preference<S: Scalar = f64> {
    direction: Vec<S>,
    normalized: bool,
}

impl<S: Scalar> Preference<S> {
    /// A raw (not necessarily unit) direction.
    pub fn new(direction: Vec<S>) -> Result<Self> {
        Self::validate(&direction)?;
        Ok(Self {
            direction,
            normalized: false,
        })
    }

    /// A unit direction; the input is normalized.
    pub fn unit(mut direction: Vec<S>) -> Result<Self> {
        Self::validate(&direction)?;
        let norm = direction
            .iter()
            .map(|&x| x * x)
            .fold(S::zero(), |a, b| a + b)
            .sqrt();
        for x in &mut direction {
            *x = *x / norm;
        }
        Ok(Self {
            direction,
            normalized: true,
        })
    }

    /// Direction already known to be unit-norm and non-negative.
    pub(crate) fn unit_unchecked(direction: Vec<S>) -> Self {
        Self {
            direction,
            normalized: true,
        }
    }

    fn validate(direction: &[S]) -> Result<()> {
        if direction.is_empty()
            || direction.iter().any(|&x| !(x.is_finite() && x >= S::zero()))
            || direction.iter().all(|&x| x == S::zero())
        {
            return Err(Error::InvalidPreference);
        }
        Ok(())
    }

    pub fn direction(&self) -> &[S] {
        &self.direction
    }

    pub fn dims(&self) -> usize {
        self.direction.len()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Componentwise scaling by `t > 0`; the result is marked unnormalized.
    pub fn scaled(&self, t: S) -> Self {
        Self {
            direction: self.direction.iter().map(|&x| x * t).collect(),
            normalized: false,
        }
    }

    /// Euclidean norm of the direction.
    pub fn norm(&self) -> S {
        self.direction
            .iter()
            .map(|&x| x * x)
            .fold(S::zero(), |a, b| a + b)
            .sqrt()
    }
}

/// Top-k answer: `(id, score)` pairs, scores non-increasing, score ties
/// broken by ascending id.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedResult<S: Scalar = f64> {
    entries: Vec<(usize, S)>,
}

impl<S: Scalar> RankedResult<S> {
    pub(crate) fn new(entries: Vec<(usize, S)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].1 >= w[1].1));
        Self { entries }
    }

    pub fn entries(&self) -> &[(usize, S)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&(id, _)| id)
    }

    /// Score of the lowest-ranked (k-th) entry.
    pub fn kth_score(&self) -> S {
        self.entries.last().expect("non-empty ranking").1
    }
}

/// Convenience constructor used throughout the tests: a 2-d unit preference
/// at `angle` radians from the first axis.
pub fn unit_at_angle<S: Scalar>(angle: f64) -> Preference<S> {
    Preference::unit(vec![from_f64(angle.cos().max(0.0)), from_f64(angle.sin().max(0.0))])
        .expect("angle in [0, pi/2] gives a valid direction")
}
