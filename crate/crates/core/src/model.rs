//! Market instances, bundles, prices and allocations.

use std::fmt;
use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::valuations::Valuation;

/// Largest number of item types an [`Instance`] may carry; item sets are bitmasks.
pub const MAX_ITEMS: usize = 64;

/// Integer quantity of every item type.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bundle(pub Vec<u32>);

impl Bundle {
    pub fn zeros(m: usize) -> Self {
        Bundle(vec![0; m])
    }

    pub fn unit(m: usize, e: usize) -> Self {
        let mut z = Bundle::zeros(m);
        z.0[e] = 1;
        z
    }

    pub fn size(&self) -> u64 {
        self.0.iter().map(|&q| q as u64).sum()
    }

    /// Sum of the quantities on the items of `s`.
    pub fn on(&self, s: ItemSet) -> u64 {
        s.iter().map(|e| self.0[e] as u64).sum()
    }

    pub fn fits(&self, supply: &[u32]) -> bool {
        self.0.len() == supply.len() && self.0.iter().zip(supply).all(|(q, b)| q <= b)
    }

    pub fn leq(&self, other: &Bundle) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Comma separated quantities, the key format of table valuations.
    pub fn to_csv(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(|q| q.to_string()).collect();
        parts.join(",")
    }

    pub fn from_csv(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Bundle(Vec::new()));
        }
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::InvalidValuation(format!("bad bundle key `{s}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Bundle)
    }
}

impl Deref for Bundle {
    type Target = [u32];
    fn deref(&self) -> &[u32] {
        &self.0
    }
}

impl DerefMut for Bundle {
    fn deref_mut(&mut self) -> &mut [u32] {
        &mut self.0
    }
}

impl From<Vec<u32>> for Bundle {
    fn from(v: Vec<u32>) -> Self {
        Bundle(v)
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_csv().replace(',', ", "))
    }
}

/// Nonnegative integer price per item type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct PriceVector(Vec<i64>);

impl PriceVector {
    pub fn new(p: Vec<i64>) -> Result<Self> {
        if let Some(e) = p.iter().position(|&x| x < 0) {
            return Err(Error::InvalidInstance(format!("negative price at item {e}")));
        }
        Ok(PriceVector(p))
    }

    pub fn zeros(m: usize) -> Self {
        PriceVector(vec![0; m])
    }

    pub fn uniform(m: usize, value: i64) -> Self {
        PriceVector(vec![value.max(0); m])
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// ⟨p, z⟩
    pub fn dot(&self, z: &[u32]) -> i64 {
        self.0.iter().zip(z).map(|(p, &q)| p * q as i64).sum()
    }

    /// p + χ_S
    pub fn raised(&self, s: ItemSet) -> PriceVector {
        let mut q = self.clone();
        for e in s.iter() {
            q.0[e] += 1;
        }
        q
    }

    /// p − χ_S, refusing to leave the nonnegative orthant.
    pub fn lowered(&self, s: ItemSet) -> Result<PriceVector> {
        let mut q = self.clone();
        for e in s.iter() {
            if q.0[e] == 0 {
                return Err(Error::InternalInvariant(format!("price of item {e} would become negative")));
            }
            q.0[e] -= 1;
        }
        Ok(q)
    }

    pub fn leq(&self, other: &PriceVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl TryFrom<Vec<i64>> for PriceVector {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        PriceVector::new(v)
    }
}

impl From<PriceVector> for Vec<i64> {
    fn from(p: PriceVector) -> Vec<i64> {
        p.0
    }
}

impl std::ops::Index<usize> for PriceVector {
    type Output = i64;
    fn index(&self, e: usize) -> &i64 {
        &self.0[e]
    }
}

impl fmt::Display for PriceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Component-wise minimum and maximum of two price vectors.
pub fn meet_join(p: &PriceVector, q: &PriceVector) -> Result<(PriceVector, PriceVector)> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch { expected: p.len(), got: q.len() });
    }
    let meet = p.0.iter().zip(&q.0).map(|(a, b)| *a.min(b)).collect();
    let join = p.0.iter().zip(&q.0).map(|(a, b)| *a.max(b)).collect();
    Ok((PriceVector(meet), PriceVector(join)))
}

/// A set of item indices below [`MAX_ITEMS`], stored as a bitmask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ItemSet(pub u64);

impl ItemSet {
    pub const EMPTY: ItemSet = ItemSet(0);

    pub fn full(m: usize) -> Self {
        if m >= 64 {
            ItemSet(u64::MAX)
        } else {
            ItemSet((1u64 << m) - 1)
        }
    }

    pub fn singleton(e: usize) -> Self {
        ItemSet(1 << e)
    }

    pub fn contains(self, e: usize) -> bool {
        self.0 >> e & 1 == 1
    }

    pub fn insert(&mut self, e: usize) {
        self.0 |= 1 << e;
    }

    pub fn remove(&mut self, e: usize) {
        self.0 &= !(1 << e);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, o: ItemSet) -> ItemSet {
        ItemSet(self.0 | o.0)
    }

    pub fn intersection(self, o: ItemSet) -> ItemSet {
        ItemSet(self.0 & o.0)
    }

    pub fn difference(self, o: ItemSet) -> ItemSet {
        ItemSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: ItemSet) -> bool {
        self.0 & !o.0 == 0
    }

    /// Complement within the ground set of `m` items.
    pub fn complement(self, m: usize) -> ItemSet {
        ItemSet::full(m).difference(self)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let e = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(e)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of the ground set of `m` items, in increasing bitmask order.
    pub fn all_subsets(m: usize) -> impl Iterator<Item = ItemSet> {
        (0..1u64 << m).map(ItemSet)
    }
}

impl FromIterator<usize> for ItemSet {
    fn from_iter<I: IntoIterator<Item = usize>>(it: I) -> Self {
        let mut s = ItemSet::EMPTY;
        for e in it {
            s.insert(e);
        }
        s
    }
}

impl fmt::Debug for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for ItemSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ItemSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        if let Some(&e) = v.iter().find(|&&e| e >= MAX_ITEMS) {
            return Err(serde::de::Error::custom(format!("item {e} out of range")));
        }
        Ok(v.into_iter().collect())
    }
}

/// One bundle per buyer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Allocation {
    pub bundles: Vec<Bundle>,
}

impl Allocation {
    pub fn new(bundles: Vec<Bundle>) -> Self {
        Allocation { bundles }
    }

    /// t(e) = Σ_i z_i(e)
    pub fn totals(&self, m: usize) -> Vec<u32> {
        let mut t = vec![0; m];
        for z in &self.bundles {
            for (te, q) in t.iter_mut().zip(z.iter()) {
                *te += q;
            }
        }
        t
    }
}

/// Partition of the items by comparing totals with supply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ItemClasses {
    pub oversold: ItemSet,
    pub undersold: ItemSet,
    pub exact: ItemSet,
}

pub fn classify_items(a: &Allocation, supply: &[u32]) -> Result<ItemClasses> {
    for z in &a.bundles {
        if z.len() != supply.len() {
            return Err(Error::LengthMismatch { expected: supply.len(), got: z.len() });
        }
        if let Some(e) = (0..z.len()).find(|&e| z[e] > supply[e]) {
            return Err(Error::BundleOutOfBounds { item: e });
        }
    }
    Ok(classify_totals(&a.totals(supply.len()), supply))
}

pub(crate) fn classify_totals(t: &[u32], supply: &[u32]) -> ItemClasses {
    let mut c = ItemClasses { oversold: ItemSet::EMPTY, undersold: ItemSet::EMPTY, exact: ItemSet::EMPTY };
    for (e, (&te, &be)) in t.iter().zip(supply).enumerate() {
        match te.cmp(&be) {
            std::cmp::Ordering::Greater => c.oversold.insert(e),
            std::cmp::Ordering::Less => c.undersold.insert(e),
            std::cmp::Ordering::Equal => c.exact.insert(e),
        }
    }
    c
}

/// z − αχ_f + αχ_e
pub fn exchange(z: &Bundle, e: usize, f: usize, alpha: u32, supply: &[u32]) -> Result<Bundle> {
    if e >= z.len() || f >= z.len() {
        return Err(Error::BundleOutOfBounds { item: e.max(f) });
    }
    if alpha == 0 {
        return Ok(z.clone());
    }
    if e == f {
        return Err(Error::InvalidInstance("exchange needs two distinct items".into()));
    }
    if z[f] < alpha {
        return Err(Error::BundleOutOfBounds { item: f });
    }
    if z[e] + alpha > supply[e] {
        return Err(Error::BundleOutOfBounds { item: e });
    }
    let mut y = z.clone();
    y[f] -= alpha;
    y[e] += alpha;
    Ok(y)
}

/// Mixed-radix indexing of the integer box [0, b].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxShape {
    dims: Vec<u32>,
    strides: Vec<usize>,
    len: usize,
}

impl BoxShape {
    /// Returns `None` when the box has more than `usize::MAX` points.
    pub fn new(dims: &[u32]) -> Option<Self> {
        let mut strides = Vec::with_capacity(dims.len());
        let mut len: usize = 1;
        for &d in dims {
            strides.push(len);
            len = len.checked_mul(d as usize + 1)?;
        }
        Some(BoxShape { dims: dims.to_vec(), strides, len })
    }

    /// Number of points, or `None` on overflow, without building the shape.
    pub fn count(dims: &[u32]) -> Option<u128> {
        dims.iter().try_fold(1u128, |acc, &d| acc.checked_mul(d as u128 + 1))
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, z: &[u32]) -> bool {
        z.len() == self.dims.len() && z.iter().zip(&self.dims).all(|(q, d)| q <= d)
    }

    pub fn index(&self, z: &[u32]) -> usize {
        z.iter().zip(&self.strides).map(|(&q, &s)| q as usize * s).sum()
    }

    pub fn stride(&self, e: usize) -> usize {
        self.strides[e]
    }

    pub fn point(&self, mut idx: usize) -> Bundle {
        let mut z = vec![0; self.dims.len()];
        for (e, &d) in self.dims.iter().enumerate() {
            let r = d as usize + 1;
            z[e] = (idx % r) as u32;
            idx /= r;
        }
        Bundle(z)
    }

    pub fn points(&self) -> impl Iterator<Item = Bundle> + '_ {
        (0..self.len).map(|i| self.point(i))
    }
}

/// A market: item supplies and one valuation per buyer, optionally with demand caps.
#[derive(Clone, Debug)]
pub struct Instance {
    supply: Vec<u32>,
    buyers: Vec<Valuation>,
    demand_caps: Option<Vec<u32>>,
    effective: Vec<Valuation>,
}

impl Instance {
    pub fn new(supply: Vec<u32>, buyers: Vec<Valuation>) -> Result<Self> {
        Self::build(supply, buyers, None, false)
    }

    pub fn with_demand_caps(supply: Vec<u32>, buyers: Vec<Valuation>, caps: Vec<u32>) -> Result<Self> {
        Self::build(supply, buyers, Some(caps), false)
    }

    fn build(supply: Vec<u32>, buyers: Vec<Valuation>, caps: Option<Vec<u32>>, allow_zero: bool) -> Result<Self> {
        let m = supply.len();
        if m == 0 {
            return Err(Error::InvalidInstance("at least one item is required".into()));
        }
        if m > MAX_ITEMS {
            return Err(Error::InvalidInstance(format!("at most {MAX_ITEMS} items are supported")));
        }
        if buyers.is_empty() {
            return Err(Error::InvalidInstance("at least one buyer is required".into()));
        }
        if !allow_zero {
            if let Some(e) = supply.iter().position(|&b| b == 0) {
                return Err(Error::InvalidInstance(format!("item {e} has zero supply")));
            }
        }
        if let Some(c) = &caps {
            if c.len() != buyers.len() {
                return Err(Error::LengthMismatch { expected: buyers.len(), got: c.len() });
            }
        }
        for (i, v) in buyers.iter().enumerate() {
            v.validate(&supply)
                .map_err(|err| Error::InvalidInstance(format!("buyer {i}: {err}")))?;
        }
        let effective = match &caps {
            None => buyers.clone(),
            Some(c) => buyers.iter().zip(c).map(|(v, &d)| v.clone().truncate(d)).collect(),
        };
        Ok(Instance { supply, buyers, demand_caps: caps, effective })
    }

    pub fn items(&self) -> usize {
        self.supply.len()
    }

    pub fn buyer_count(&self) -> usize {
        self.buyers.len()
    }

    pub fn supply(&self) -> &[u32] {
        &self.supply
    }

    pub fn total_supply(&self) -> u64 {
        self.supply.iter().map(|&b| b as u64).sum()
    }

    pub fn is_unit_supply(&self) -> bool {
        self.supply.iter().all(|&b| b == 1)
    }

    pub fn max_supply(&self) -> u32 {
        self.supply.iter().copied().max().unwrap_or(0)
    }

    /// Valuations as given, without demand caps applied.
    pub fn raw_valuations(&self) -> &[Valuation] {
        &self.buyers
    }

    pub fn demand_caps(&self) -> Option<&[u32]> {
        self.demand_caps.as_deref()
    }

    /// The valuation buyer `i` acts on, demand cap included.
    pub fn valuation(&self, i: usize) -> &Valuation {
        &self.effective[i]
    }

    pub fn valuations(&self) -> &[Valuation] {
        &self.effective
    }

    /// v_i(b), buyer i's value for the whole supply.
    pub fn full_value(&self, i: usize) -> i64 {
        self.effective[i].value(&self.supply)
    }

    pub fn max_full_value(&self) -> i64 {
        (0..self.buyer_count()).map(|i| self.full_value(i)).max().unwrap_or(0)
    }

    /// Same buyers with a different supply vector; zero supplies are allowed here.
    pub fn with_supply(&self, supply: Vec<u32>) -> Result<Instance> {
        if supply.len() != self.items() {
            return Err(Error::LengthMismatch { expected: self.items(), got: supply.len() });
        }
        if supply.iter().zip(&self.supply).any(|(a, b)| a > b) {
            return Err(Error::InvalidInstance("supply may only shrink".into()));
        }
        let buyers = self.buyers.iter().map(|v| v.restricted_to(&supply)).collect();
        Self::build(supply, buyers, self.demand_caps.clone(), true)
    }

    /// Same market with buyer `i`'s demand cap replaced.
    pub fn with_demand_cap(&self, i: usize, cap: u32) -> Result<Instance> {
        let mut caps = self
            .demand_caps
            .clone()
            .unwrap_or_else(|| vec![self.total_supply() as u32; self.buyer_count()]);
        caps[i] = cap;
        Self::build(self.supply.clone(), self.buyers.clone(), Some(caps), true)
    }

    /// Demand cap currently in force for buyer `i` (b(E) when uncapped).
    pub fn demand_cap(&self, i: usize) -> u32 {
        self.demand_caps
            .as_ref()
            .map(|c| c[i])
            .unwrap_or(self.total_supply() as u32)
    }

    pub fn check_bundle(&self, z: &[u32]) -> Result<()> {
        if z.len() != self.items() {
            return Err(Error::LengthMismatch { expected: self.items(), got: z.len() });
        }
        match (0..z.len()).find(|&e| z[e] > self.supply[e]) {
            Some(e) => Err(Error::BundleOutOfBounds { item: e }),
            None => Ok(()),
        }
    }
}
