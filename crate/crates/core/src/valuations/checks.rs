use std::collections::HashSet;

use super::Valuation;
use crate::bruteforce::EnumerationBudget;
use crate::error::Result;
use crate::model::Bundle;

/// Exhaustive test of the exchange conditions (M1)/(M2) on the box [0, supply].
pub fn check_mnat_concave(v: &Valuation, supply: &[u32], budget: &EnumerationBudget) -> Result<bool> {
    let shape = budget.box_shape(supply)?;
    let values: Vec<i64> = shape.points().map(|z| v.value(&z)).collect();
    let m = supply.len();
    for xi in 0..shape.len() {
        let x = shape.point(xi);
        for yi in 0..shape.len() {
            let y = shape.point(yi);
            let lhs = values[xi] + values[yi];
            for e in (0..m).filter(|&e| x[e] > y[e]) {
                let (se, ye) = (shape.stride(e), yi + shape.stride(e));
                if lhs <= values[xi - se] + values[ye] {
                    continue;
                }
                let m2 = (0..m)
                    .filter(|&f| x[f] < y[f])
                    .any(|f| lhs <= values[xi - se + shape.stride(f)] + values[ye - shape.stride(f)]);
                if !m2 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Exchange axiom: for x, y in the set and e with x(e) > y(e) there is f with
/// x(f) < y(f) such that x − χ_e + χ_f and y + χ_e − χ_f are both in the set.
pub fn check_m_convex(set: &[Bundle]) -> bool {
    let members: HashSet<&Bundle> = set.iter().collect();
    for x in set {
        for y in set {
            for e in (0..x.len()).filter(|&e| x[e] > y[e]) {
                let ok = (0..x.len()).filter(|&f| x[f] < y[f]).any(|f| {
                    let mut x2 = x.clone();
                    x2[e] -= 1;
                    x2[f] += 1;
                    let mut y2 = y.clone();
                    y2[e] += 1;
                    y2[f] -= 1;
                    members.contains(&x2) && members.contains(&y2)
                });
                if !ok {
                    return false;
                }
            }
        }
    }
    true
}

