use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{BoxShape, Bundle};

/// A valuation listed point by point on the whole box [0, b].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableValuation {
    shape: BoxShape,
    values: Vec<i64>,
}

impl TableValuation {
    /// `values[k]` is the value of `BoxShape::new(dims).point(k)`.
    pub fn from_dense(dims: &[u32], values: Vec<i64>) -> Result<Self> {
        let shape = BoxShape::new(dims).ok_or_else(|| Error::InvalidValuation("table box too large".into()))?;
        if values.len() != shape.len() {
            return Err(Error::InvalidValuation(format!(
                "table needs {} values, got {}",
                shape.len(),
                values.len()
            )));
        }
        Ok(TableValuation { shape, values })
    }

    /// Tabulates `f` on the box [0, dims].
    pub fn from_fn(dims: &[u32], mut f: impl FnMut(&[u32]) -> i64) -> Result<Self> {
        let shape = BoxShape::new(dims).ok_or_else(|| Error::InvalidValuation("table box too large".into()))?;
        let values = shape.points().map(|z| f(&z)).collect();
        Ok(TableValuation { shape, values })
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (Bundle, i64)>) -> Result<Self> {
        let entries: Vec<(Bundle, i64)> = entries.into_iter().collect();
        let m = entries.first().map(|(z, _)| z.len()).unwrap_or(0);
        if entries.iter().any(|(z, _)| z.len() != m) {
            return Err(Error::InvalidValuation("table keys have different lengths".into()));
        }
        let mut dims = vec![0u32; m];
        for (z, _) in &entries {
            for (d, &q) in dims.iter_mut().zip(z.iter()) {
                *d = (*d).max(q);
            }
        }
        let shape = BoxShape::new(&dims).ok_or_else(|| Error::InvalidValuation("table box too large".into()))?;
        let mut values = vec![None; shape.len()];
        for (z, v) in entries {
            let k = shape.index(&z);
            if values[k].replace(v).is_some() {
                return Err(Error::InvalidValuation(format!("duplicate table key {}", z.to_csv())));
            }
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(k, v)| v.ok_or_else(|| Error::InvalidValuation(format!("table misses {}", shape.point(k).to_csv()))))
            .collect::<Result<Vec<_>>>()?;
        Ok(TableValuation { shape, values })
    }

    pub fn dims(&self) -> &[u32] {
        self.shape.dims()
    }

    pub fn get(&self, z: &[u32]) -> i64 {
        debug_assert!(self.shape.contains(z), "bundle outside the table box");
        self.values[self.shape.index(z)]
    }

    pub fn try_get(&self, z: &[u32]) -> Option<i64> {
        self.shape.contains(z).then(|| self.values[self.shape.index(z)])
    }

    /// v(0) = 0, nonnegative and non-decreasing.
    pub fn validate(&self) -> Result<()> {
        if self.values[0] != 0 {
            return Err(Error::InvalidValuation("table value of the empty bundle must be 0".into()));
        }
        for k in 0..self.shape.len() {
            if self.values[k] < 0 {
                return Err(Error::InvalidValuation("table values must be nonnegative".into()));
            }
            let z = self.shape.point(k);
            for e in 0..z.len() {
                if z[e] < self.shape.dims()[e] && self.values[k + self.shape.stride(e)] < self.values[k] {
                    return Err(Error::InvalidValuation(format!(
                        "table is not monotone at {} in item {e}",
                        z.to_csv()
                    )));
                }
            }
        }
        Ok(())
    }

    /// The same table on the smaller box [0, dims].
    pub fn restricted(&self, dims: &[u32]) -> TableValuation {
        TableValuation::from_fn(dims, |z| self.get(z)).expect("sub-box of a valid box")
    }
}

impl Serialize for TableValuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<String, i64> = self
            .shape
            .points()
            .zip(&self.values)
            .map(|(z, &v)| (z.to_csv(), v))
            .collect();
        map.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TableValuation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let map = BTreeMap::<String, i64>::deserialize(d)?;
        let entries = map
            .into_iter()
            .map(|(k, v)| Bundle::from_csv(&k).map(|z| (z, v)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        TableValuation::from_entries(entries).map_err(serde::de::Error::custom)
    }
}
