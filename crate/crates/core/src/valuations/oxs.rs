/// Maximum total weight of a matching in a bipartite graph given as a
/// `rows × cols` weight matrix with nonnegative entries (0 = no edge).
///
/// Hungarian method with potentials on the padded square matrix, O(k³).
pub fn max_weight_matching(weights: &[Vec<i64>], cols: usize) -> i64 {
    let rows = weights.len();
    let k = rows.max(cols);
    if k == 0 {
        return 0;
    }
    let cost = |r: usize, c: usize| -> i64 {
        if r < rows && c < cols {
            -weights[r][c]
        } else {
            0
        }
    };
    // 1-based arrays as in the classical formulation; column 0 is a sentinel.
    let inf = i64::MAX / 4;
    let mut u = vec![0i64; k + 1];
    let mut v = vec![0i64; k + 1];
    let mut p = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for i in 1..=k {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=k {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut total = 0;
    for j in 1..=k {
        if p[j] != 0 {
            total -= cost(p[j] - 1, j - 1);
        }
    }
    total
}
