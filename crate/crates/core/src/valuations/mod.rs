//! Valuation families, the demand and exchange oracles, and validity checks.

mod checks;
mod matroid;
mod oracle;
mod oxs;
mod table;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Bundle, Instance};

pub use checks::{check_m_convex, check_mnat_concave};
pub use matroid::Matroid;
pub use oracle::{
    demand, indirect_utility, rank, tight_set, BuyerOracle, DemandSide, IndirectUtility, OracleCounters,
};
pub use oxs::max_weight_matching;
pub use table::TableValuation;

/// A buyer's valuation v: [0, b] → ℤ₊.
///
/// All families are monotone with v(0) = 0. The structured families are
/// strong gross substitutes; tables may be anything monotone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Valuation {
    /// Value of the best single item type present.
    UnitDemand { weights: Vec<i64> },
    /// Every unit of item `e` is worth `weights[e]`.
    Additive { weights: Vec<i64> },
    /// Heaviest independent set among the item types present.
    MatroidRank { matroid: Matroid, weights: Vec<i64> },
    /// Maximum weight matching of the units in the bundle to `right_size`
    /// right vertices; edges are `(item, right vertex, weight)`.
    Oxs { right_size: usize, edges: Vec<(usize, usize, i64)> },
    Table { values: TableValuation },
    /// Best value of a sub-bundle with at most `cap` units.
    Truncated { inner: Box<Valuation>, cap: u32 },
    /// Valuation on copy items: a bundle of copies is worth what its image
    /// under `projection` (copy → original item) is worth to `inner`.
    CopyProjected { inner: Box<Valuation>, projection: Vec<usize> },
}

impl Valuation {
    pub fn unit_demand(weights: Vec<i64>) -> Self {
        Valuation::UnitDemand { weights }
    }

    pub fn additive(weights: Vec<i64>) -> Self {
        Valuation::Additive { weights }
    }

    pub fn matroid_rank(matroid: Matroid, weights: Vec<i64>) -> Self {
        Valuation::MatroidRank { matroid, weights }
    }

    pub fn oxs(right_size: usize, edges: Vec<(usize, usize, i64)>) -> Self {
        Valuation::Oxs { right_size, edges }
    }

    pub fn table(values: TableValuation) -> Self {
        Valuation::Table { values }
    }

    /// Caps the number of units the buyer cares about.
    pub fn truncate(self, cap: u32) -> Self {
        Valuation::Truncated { inner: Box::new(self), cap }
    }

    /// v(z) for z inside the box the valuation was validated against.
    pub fn value(&self, z: &[u32]) -> i64 {
        match self {
            Valuation::UnitDemand { weights } => {
                z.iter().zip(weights).filter(|(&q, _)| q > 0).map(|(_, &w)| w).max().unwrap_or(0)
            }
            Valuation::Additive { weights } => z.iter().zip(weights).map(|(&q, &w)| q as i64 * w).sum(),
            Valuation::MatroidRank { matroid, weights } => {
                let support = (0..z.len()).filter(|&e| z[e] > 0).collect();
                matroid.max_weight(support, weights)
            }
            Valuation::Oxs { right_size, edges } => {
                let mut per_item = vec![vec![0i64; *right_size]; z.len()];
                for &(e, r, w) in edges {
                    per_item[e][r] = per_item[e][r].max(w);
                }
                let mut rows = Vec::new();
                for (e, &q) in z.iter().enumerate() {
                    if per_item[e].iter().any(|&w| w > 0) {
                        let units = (q as usize).min(*right_size);
                        rows.extend(std::iter::repeat_n(per_item[e].clone(), units));
                    }
                }
                max_weight_matching(&rows, *right_size)
            }
            Valuation::Table { values } => values.get(z),
            Valuation::Truncated { inner, cap } => truncated_value(inner, z, *cap),
            Valuation::CopyProjected { inner, projection } => inner.value(&project(projection, z)),
        }
    }

    /// v(z), refusing bundles outside [0, supply].
    pub fn value_checked(&self, z: &[u32], supply: &[u32]) -> Result<i64> {
        if z.len() != supply.len() {
            return Err(Error::LengthMismatch { expected: supply.len(), got: z.len() });
        }
        if let Some(e) = (0..z.len()).find(|&e| z[e] > supply[e]) {
            return Err(Error::BundleOutOfBounds { item: e });
        }
        Ok(self.value(z))
    }

    /// Checks that the valuation is well formed on the box [0, supply].
    pub fn validate(&self, supply: &[u32]) -> Result<()> {
        let m = supply.len();
        let check_weights = |weights: &[i64]| -> Result<()> {
            if weights.len() != m {
                return Err(Error::InvalidValuation(format!("expected {m} weights, got {}", weights.len())));
            }
            if weights.iter().any(|&w| w < 0) {
                return Err(Error::InvalidValuation("weights must be nonnegative".into()));
            }
            Ok(())
        };
        match self {
            Valuation::UnitDemand { weights } | Valuation::Additive { weights } => check_weights(weights),
            Valuation::MatroidRank { matroid, weights } => {
                check_weights(weights)?;
                matroid.validate(m)
            }
            Valuation::Oxs { right_size, edges } => {
                for &(e, r, w) in edges {
                    if e >= m || r >= *right_size || w < 0 {
                        return Err(Error::InvalidValuation(format!("bad OXS edge ({e}, {r}, {w})")));
                    }
                }
                Ok(())
            }
            Valuation::Table { values } => {
                if values.dims() != supply {
                    return Err(Error::InvalidValuation("table must be defined on exactly the supply box".into()));
                }
                values.validate()
            }
            Valuation::Truncated { inner, .. } => inner.validate(supply),
            Valuation::CopyProjected { inner, projection } => {
                if projection.len() != m {
                    return Err(Error::InvalidValuation("projection must map every copy item".into()));
                }
                let original = projection.iter().max().map(|&e| e + 1).unwrap_or(0);
                let mut image = vec![0u32; original];
                for (c, &e) in projection.iter().enumerate() {
                    image[e] += supply[c];
                }
                inner.validate(&image)
            }
        }
    }

    /// The valuation on a smaller box; only tables change representation.
    pub fn restricted_to(&self, supply: &[u32]) -> Valuation {
        match self {
            Valuation::Table { values } => Valuation::Table { values: values.restricted(supply) },
            Valuation::Truncated { inner, cap } => {
                Valuation::Truncated { inner: Box::new(inner.restricted_to(supply)), cap: *cap }
            }
            Valuation::CopyProjected { inner, projection } => Valuation::CopyProjected {
                inner: Box::new(inner.restricted_to(&project(projection, supply))),
                projection: projection.clone(),
            },
            other => other.clone(),
        }
    }

    /// Short family name as used by the instance file format.
    pub fn family(&self) -> &'static str {
        match self {
            Valuation::UnitDemand { .. } => "unit_demand",
            Valuation::Additive { .. } => "additive",
            Valuation::MatroidRank { .. } => "matroid_rank",
            Valuation::Oxs { .. } => "oxs",
            Valuation::Table { .. } => "table",
            Valuation::Truncated { .. } => "truncated",
            Valuation::CopyProjected { .. } => "copy_projected",
        }
    }
}

fn project(projection: &[usize], z: &[u32]) -> Vec<u32> {
    let original = projection.iter().max().map(|&e| e + 1).unwrap_or(0);
    let mut y = vec![0u32; original];
    for (c, &e) in projection.iter().enumerate() {
        y[e] += z[c];
    }
    y
}

/// Greedy with zero prices inside [0, z]: for strong gross substitutes the
/// first `cap` greedy units form a best bundle of that size.
fn truncated_value(inner: &Valuation, z: &[u32], cap: u32) -> i64 {
    let size: u64 = z.iter().map(|&q| q as u64).sum();
    if size <= cap as u64 {
        return inner.value(z);
    }
    let mut y = vec![0u32; z.len()];
    let mut val = 0;
    for _ in 0..cap {
        let mut best: Option<(usize, i64)> = None;
        for e in 0..z.len() {
            if y[e] < z[e] {
                y[e] += 1;
                let v = inner.value(&y);
                y[e] -= 1;
                if best.is_none_or(|(_, bv)| v > bv) {
                    best = Some((e, v));
                }
            }
        }
        let (e, v) = best.expect("size exceeds cap");
        y[e] += 1;
        val = v;
    }
    val
}

/// Splits every item into b(e) unit-supply copies.
///
/// Returns the copied market and the projection copy → original item.
pub fn copy_to_unit_supply(inst: &Instance) -> Result<(Instance, Vec<usize>)> {
    if inst.is_unit_supply() {
        return Ok((inst.clone(), (0..inst.items()).collect()));
    }
    let projection: Vec<usize> = inst
        .supply()
        .iter()
        .enumerate()
        .flat_map(|(e, &b)| std::iter::repeat_n(e, b as usize))
        .collect();
    let supply = vec![1; projection.len()];
    let buyers = inst
        .raw_valuations()
        .iter()
        .map(|v| Valuation::CopyProjected { inner: Box::new(v.clone()), projection: projection.clone() })
        .collect();
    let copied = match inst.demand_caps() {
        Some(caps) => Instance::with_demand_caps(supply, buyers, caps.to_vec())?,
        None => Instance::new(supply, buyers)?,
    };
    Ok((copied, projection))
}

/// Bundles of the original market seen through the projection.
pub fn project_bundle(projection: &[usize], z: &Bundle) -> Bundle {
    Bundle(project(projection, z))
}
