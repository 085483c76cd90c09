//! The permutohedral subdivision of the torus `ℝ^{n-1}/N'` as an explicit
//! face poset, its dual simplicial poset and the f/h-numbers of the latter.
//!
//! A face is a class of pairs `(k, (B_1, ..., B_{j+1}))` with `k ∈ ℤ/n` and
//! an ordered set partition of `{1..n}`, under
//! `(k, (B_1, B_2, ..., B_{j+1})) ~ (k + |B_1|, (B_2, ..., B_{j+1}, B_1))`.
//! Its dimension is `n - 1 - j`; the `n` top cells are `(k, ({1..n}))`.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on `n` for explicit complexes.
pub const COMPLEX_CAP: usize = 8;

/// Cap on `n` for exact f/h statistics.
pub const STATS_CAP: usize = 20;

pub fn factorial(n: usize) -> Result<i128> {
    (1..=n as i128)
        .try_fold(1i128, |acc, k| acc.checked_mul(k))
        .ok_or(Error::Overflow("factorial"))
}

pub fn binomial(n: usize, k: usize) -> Result<i128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul((n - i) as i128)
            .ok_or(Error::Overflow("binomial"))?
            / (i as i128 + 1);
    }
    Ok(acc)
}

/// Stirling number of the second kind `S(n, k)`.
pub fn stirling2(n: usize, k: usize) -> Result<i128> {
    if k > n {
        return Err(Error::invalid(format!("S({n}, {k}) needs k <= n")));
    }
    let mut row = vec![1i128];
    for m in 1..=n {
        let mut next = vec![0i128; m + 1];
        for j in 1..=m {
            let stay = if j < m {
                row[j]
                    .checked_mul(j as i128)
                    .ok_or(Error::Overflow("stirling"))?
            } else {
                0
            };
            next[j] = stay
                .checked_add(row[j - 1])
                .ok_or(Error::Overflow("stirling"))?;
        }
        row = next;
    }
    Ok(row[k])
}

/// The lattice `N ⊂ ℤⁿ` spanned by `α_i = nε_i - (1,...,1)` and the
/// sublattice `N'` spanned by `β_k = α_k - α_{k+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattices {
    pub n: usize,
    pub alpha: Vec<Vec<i64>>,
    pub beta: Vec<Vec<i64>>,
}

impl Lattices {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("lattices need n >= 2"));
        }
        let alpha: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { n as i64 - 1 } else { -1 })
                    .collect()
            })
            .collect();
        let beta = (0..n - 1)
            .map(|k| {
                alpha[k]
                    .iter()
                    .zip(&alpha[k + 1])
                    .map(|(x, y)| x - y)
                    .collect()
            })
            .collect();
        Ok(Lattices { n, alpha, beta })
    }

    /// Coordinates of `v ∈ N` in the basis `α_1, ..., α_{n-1}`, or `None` if
    /// `v ∉ N`.
    pub fn coordinates(&self, v: &[i64]) -> Option<Vec<i64>> {
        let n = self.n as i64;
        if v.len() != self.n || v.iter().sum::<i64>() != 0 {
            return None;
        }
        let last = v[self.n - 1];
        v[..self.n - 1]
            .iter()
            .map(|&x| {
                if (x - last) % n == 0 {
                    Some((x - last) / n)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Class of `v ∈ N` in `N/N' ≅ ℤ/n`.
    pub fn class_mod_sublattice(&self, v: &[i64]) -> Option<usize> {
        let c = self.coordinates(v)?;
        Some(c.iter().sum::<i64>().rem_euclid(self.n as i64) as usize)
    }

    /// Index in `N` of the sublattice spanned by `n - 1` vectors of `N`.
    pub fn index_of(&self, generators: &[Vec<i64>]) -> Result<i128> {
        if generators.len() != self.n - 1 {
            return Err(Error::invalid("index needs exactly n - 1 generators"));
        }
        let rows = generators
            .iter()
            .map(|g| {
                self.coordinates(g)
                    .ok_or_else(|| Error::invalid("generator not in N"))
            })
            .collect::<Result<Vec<_>>>()?;
        let m: Vec<Vec<i128>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        Ok(bareiss_det(m)?.abs())
    }

    /// `[N : N']`.
    pub fn sublattice_index(&self) -> Result<i128> {
        self.index_of(&self.beta)
    }
}

/// Fraction-free Gaussian elimination.
fn bareiss_det(mut m: Vec<Vec<i128>>) -> Result<i128> {
    let n = m.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i][j]
                    .checked_mul(m[k][k])
                    .and_then(|x| x.checked_sub(m[i][k].checked_mul(m[k][j])?))
                    .ok_or(Error::Overflow("determinant"))?;
                m[i][j] = v / prev;
            }
        }
        prev = m[k][k];
    }
    Ok(sign * m.last().map_or(1, |r| r[n - 1]))
}

/// A face class, stored by its canonical representative. `labels[e]` is the
/// block index of element `e + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face {
    pub k: usize,
    pub labels: Vec<u8>,
}

impl Face {
    pub fn block_count(&self) -> usize {
        self.labels
            .iter()
            .map(|&l| l as usize + 1)
            .max()
            .unwrap_or(0)
    }

    /// Blocks as sorted lists of elements `1..=n`.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.block_count()];
        for (e, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(e + 1);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.labels.len() - self.block_count()
    }

    fn from_blocks(n: usize, k: usize, blocks: &[Vec<usize>]) -> Self {
        let mut labels = vec![0u8; n];
        for (b, block) in blocks.iter().enumerate() {
            for &e in block {
                labels[e - 1] = b as u8;
            }
        }
        Face { k: k % n, labels }
    }

    /// `(k + |B_1|, (B_2, ..., B_1))`.
    fn rotated(&self) -> Self {
        let n = self.labels.len();
        let blocks = self.block_count() as u8;
        let first = self.labels.iter().filter(|&&l| l == 0).count();
        let labels = self
            .labels
            .iter()
            .map(|&l| (l + blocks - 1) % blocks)
            .collect();
        Face {
            k: (self.k + first) % n,
            labels,
        }
    }

    fn sort_key(&self) -> (usize, Vec<Vec<usize>>) {
        (self.k, self.blocks())
    }

    /// Lexicographically least rotation, comparing `k` first and then the
    /// list of sorted blocks.
    pub fn canonical(&self) -> Self {
        let mut best = self.clone();
        let mut best_key = best.sort_key();
        let mut cur = self.clone();
        for _ in 1..self.block_count() {
            cur = cur.rotated();
            let key = cur.sort_key();
            if key < best_key {
                best = cur.clone();
                best_key = key;
            }
        }
        best
    }

    /// Top cells `k, k + |B_1|, ..., k + |B_1| + ... + |B_j|` containing the face.
    pub fn containing_cells(&self) -> Vec<usize> {
        let n = self.labels.len();
        let mut acc = self.k;
        let mut cells = vec![acc];
        for block in self.blocks().iter().take(self.block_count() - 1) {
            acc = (acc + block.len()) % n;
            cells.push(acc);
        }
        cells.sort_unstable();
        cells
    }

    /// The `j + 1` faces obtained by merging cyclically adjacent blocks.
    fn merges(&self) -> Vec<Face> {
        let n = self.labels.len();
        let blocks = self.blocks();
        let count = blocks.len();
        let mut out = Vec::with_capacity(count);
        for i in 0..count - 1 {
            let mut merged: Vec<Vec<usize>> = Vec::with_capacity(count - 1);
            merged.extend_from_slice(&blocks[..i]);
            let mut joined = blocks[i].clone();
            joined.extend_from_slice(&blocks[i + 1]);
            merged.push(joined);
            merged.extend_from_slice(&blocks[i + 2..]);
            out.push(Face::from_blocks(n, self.k, &merged));
        }
        // (B_{j+1} ∪ B_1, B_2, ..., B_j) placed at k - |B_{j+1}|
        let last = &blocks[count - 1];
        let mut joined = last.clone();
        joined.extend_from_slice(&blocks[0]);
        let mut merged = vec![joined];
        merged.extend_from_slice(&blocks[1..count - 1]);
        out.push(Face::from_blocks(n, self.k + n - last.len(), &merged));
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FaceJson {
    pub k: usize,
    pub partition: Vec<Vec<usize>>,
    pub dim: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PosetDump {
    pub n: usize,
    pub faces: Vec<FaceJson>,
    /// `(face, coface)` index pairs with `dim coface = dim face + 1`.
    pub covers: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct WonderfulComplex {
    pub n: usize,
    /// Sorted by decreasing dimension, then canonical representative.
    pub faces: Vec<Face>,
    /// `(face, coface)` index pairs.
    pub covers: Vec<(usize, usize)>,
    /// Top cells containing each face, from the partial-sum rule.
    pub cells: Vec<Vec<usize>>,
}

/// Enumerates every face class with its covering relation.
pub fn build_complex(n: usize, cap: usize) -> Result<WonderfulComplex> {
    if n < 3 {
        return Err(Error::invalid("complex needs n >= 3"));
    }
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let mut faces = Vec::new();
    for blocks in 1..=n {
        let mut labels = vec![0u8; n];
        loop {
            if (0..blocks as u8).all(|b| labels.contains(&b)) {
                for k in 0..n {
                    let f = Face {
                        k,
                        labels: labels.clone(),
                    };
                    if f.canonical() == f {
                        faces.push(f);
                    }
                }
            }
            if !next_labels(&mut labels, blocks as u8) {
                break;
            }
        }
    }
    faces.sort_by(|x, y| {
        y.dim()
            .cmp(&x.dim())
            .then_with(|| x.sort_key().cmp(&y.sort_key()))
    });
    let index: HashMap<Face, usize> = faces
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, f)| (f, i))
        .collect();
    let mut covers = Vec::new();
    for (i, f) in faces.iter().enumerate() {
        if f.block_count() < 2 {
            continue;
        }
        for m in f.merges() {
            covers.push((i, index[&m.canonical()]));
        }
    }
    let cells = faces.iter().map(Face::containing_cells).collect();
    Ok(WonderfulComplex {
        n,
        faces,
        covers,
        cells,
    })
}

/// Next word in `{0..base}^n` in lexicographic order.
fn next_labels(labels: &mut [u8], base: u8) -> bool {
    for i in (0..labels.len()).rev() {
        if labels[i] + 1 < base {
            labels[i] += 1;
            for l in &mut labels[i + 1..] {
                *l = 0;
            }
            return true;
        }
    }
    false
}

impl WonderfulComplex {
    /// Number of faces of each dimension `0..n-1`.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0; self.n];
        for face in &self.faces {
            f[face.dim()] += 1;
        }
        f
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    /// Vertices (dimension 0) and edges as vertex-index pairs; vertex indices
    /// count only the 0-dimensional faces.
    pub fn one_skeleton(&self) -> (usize, Vec<(usize, usize)>) {
        let vertex_ids: HashMap<usize, usize> = self
            .faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.dim() == 0)
            .enumerate()
            .map(|(v, (i, _))| (i, v))
            .collect();
        let mut ends: HashMap<usize, Vec<usize>> = HashMap::new();
        for &(lo, hi) in &self.covers {
            if let Some(&v) = vertex_ids.get(&lo) {
                ends.entry(hi).or_default().push(v);
            }
        }
        let mut edges: Vec<(usize, usize)> = ends
            .into_values()
            .filter(|e| e.len() == 2)
            .map(|e| (e[0].min(e[1]), e[0].max(e[1])))
            .collect();
        edges.sort_unstable();
        (vertex_ids.len(), edges)
    }

    pub fn dump(&self) -> PosetDump {
        PosetDump {
            n: self.n,
            faces: self
                .faces
                .iter()
                .map(|f| FaceJson {
                    k: f.k,
                    partition: f.blocks(),
                    dim: f.dim(),
                })
                .collect(),
            covers: self.covers.clone(),
        }
    }

    /// Returns a copy in which the identification of the facet `index` is
    /// undone: the facet is duplicated and each copy bounds only one of its
    /// two top cells.
    pub fn without_identification(&self, index: usize) -> Result<Self> {
        let face = self
            .faces
            .get(index)
            .ok_or_else(|| Error::invalid("face index out of range"))?;
        if face.dim() + 2 != self.n {
            return Err(Error::invalid("only facets can be split"));
        }
        let mut out = self.clone();
        let copy = out.faces.len();
        out.faces.push(face.clone());
        out.cells.push(Vec::new());
        let up = out
            .covers
            .iter()
            .position(|&(lo, _)| lo == index)
            .expect("facet has a coface");
        out.covers[up].0 = copy;
        let below: Vec<usize> = self
            .covers
            .iter()
            .filter(|&&(_, hi)| hi == index)
            .map(|&(lo, _)| lo)
            .collect();
        out.covers.extend(below.into_iter().map(|lo| (lo, copy)));
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrystallizationReport {
    /// Vertices of the dual simplicial poset (top cells of the complex).
    pub dual_vertices: usize,
    pub dimension: usize,
    pub violations: Vec<String>,
}

impl CrystallizationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that the dual poset is a simplicial poset with `n` vertices:
/// every upper interval of the complex is dual to a Boolean lattice, and
/// every maximal face is top-dimensional.
pub fn verify_crystallization(c: &WonderfulComplex) -> CrystallizationReport {
    let n = c.n;
    let count = c.faces.len();
    let mut up: Vec<Vec<usize>> = vec![Vec::new(); count];
    for &(lo, hi) in &c.covers {
        up[lo].push(hi);
    }
    let top: Vec<usize> = (0..count).filter(|&i| c.faces[i].dim() == n - 1).collect();
    let top_pos: HashMap<usize, usize> = top.iter().enumerate().map(|(p, &i)| (i, p)).collect();
    let mut violations = Vec::new();
    if top.len() != n {
        violations.push(format!("dual has {} vertices, expected {n}", top.len()));
    }
    for i in 0..count {
        if up[i].is_empty() && c.faces[i].dim() != n - 1 {
            violations.push(format!(
                "face {i} is maximal but has dimension {}",
                c.faces[i].dim()
            ));
        }
    }

    // top cells above each face by upward closure
    let closure = |start: usize| -> Vec<usize> {
        let mut seen = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(f) = queue.pop_front() {
            for &g in &up[f] {
                if !seen.contains(&g) {
                    seen.push(g);
                    queue.push_back(g);
                }
            }
        }
        seen
    };
    let mut cell_mask = vec![0u64; count];
    for i in 0..count {
        for g in closure(i) {
            if let Some(&p) = top_pos.get(&g) {
                cell_mask[i] |= 1 << p;
            }
        }
    }
    for i in 0..count {
        let codim = n - 1 - c.faces[i].dim();
        let mask = cell_mask[i];
        if mask.count_ones() as usize != codim + 1 {
            violations.push(format!(
                "face {i} of codimension {codim} lies in {} top cells",
                mask.count_ones()
            ));
            continue;
        }
        // the upper interval must map bijectively onto nonempty subsets of `mask`
        let interval = closure(i);
        let mut masks: Vec<u64> = interval.iter().map(|&g| cell_mask[g]).collect();
        masks.sort_unstable();
        masks.dedup();
        let boolean = (1usize << (codim + 1)) - 1;
        if masks.len() != interval.len()
            || masks.len() != boolean
            || masks.iter().any(|m| m & !mask != 0 || *m == 0)
        {
            violations.push(format!(
                "upper interval of face {i} is not dual to a Boolean lattice"
            ));
            continue;
        }
        // covers drop exactly one top cell, and there are as many as in the Boolean lattice
        let mut cover_count = 0usize;
        for &g in &interval {
            for &h in &up[g] {
                cover_count += 1;
                let (mg, mh) = (cell_mask[g], cell_mask[h]);
                if mh & !mg != 0 || (mg & !mh).count_ones() != 1 {
                    violations.push(format!(
                        "cover {g} < {h} is not order-reversing onto subsets"
                    ));
                }
            }
        }
        let expected: usize = (2..=codim + 1).map(|s| s * binom_usize(codim + 1, s)).sum();
        if cover_count != expected {
            violations.push(format!(
                "upper interval of face {i} has {cover_count} covers, expected {expected}"
            ));
        }
    }
    for i in 0..count.min(c.cells.len()) {
        let formula: u64 = c.cells[i]
            .iter()
            .filter_map(|k| top.iter().position(|&t| c.faces[t].k == *k))
            .map(|p| 1 << p)
            .sum();
        if !c.cells[i].is_empty() && formula != cell_mask[i] {
            violations.push(format!(
                "face {i}: partial-sum cells disagree with the covering relation"
            ));
        }
    }
    CrystallizationReport {
        dual_vertices: top.len(),
        dimension: n - 1,
        violations,
    }
}

fn binom_usize(n: usize, k: usize) -> usize {
    binomial(n, k).map(|x| x as usize).unwrap_or(0)
}

/// f-, h-, h'- and h''-numbers of the dual simplicial poset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialStats {
    pub n: usize,
    /// `f_{-1}, f_0, ..., f_{n-1}`.
    pub f: Vec<i128>,
    pub h: Vec<i128>,
    pub h_prime: Vec<i128>,
    pub h_pp: Vec<i128>,
    /// Reduced Betti numbers `β̃_0, ..., β̃_{n-1}` of the torus `T^{n-1}`.
    pub betti_tilde: Vec<i128>,
}

pub fn dual_poset_stats(n: usize) -> Result<SimplicialStats> {
    if !(3..=STATS_CAP).contains(&n) {
        return Err(Error::invalid(format!(
            "stats need 3 <= n <= {STATS_CAP}, got {n}"
        )));
    }
    let overflow = || Error::Overflow("simplicial stats");
    let mut f = vec![1i128];
    for k in 1..=n {
        let v = (n as i128)
            .checked_mul(factorial(k - 1)?)
            .and_then(|x| x.checked_mul(stirling2(n, k).ok()?))
            .ok_or_else(overflow)?;
        f.push(v);
    }
    // Σ h_i t^{n-i} = Σ f_{j-1} (t-1)^{n-j}
    let mut h = vec![0i128; n + 1];
    for (i, hi) in h.iter_mut().enumerate() {
        for j in 0..=i {
            let term = binomial(n - j, i - j)?
                .checked_mul(f[j])
                .ok_or_else(overflow)?;
            *hi = if (i - j) % 2 == 0 {
                hi.checked_add(term)
            } else {
                hi.checked_sub(term)
            }
            .ok_or_else(overflow)?;
        }
    }
    let betti_tilde: Vec<i128> = (0..n)
        .map(|j| if j == 0 { Ok(0) } else { binomial(n - 1, j) })
        .collect::<Result<_>>()?;
    let mut h_prime = h.clone();
    for j in 1..=n {
        let mut alt = 0i128;
        for s in 1..j {
            let b = betti_tilde[s - 1];
            alt += if (j - s - 1) % 2 == 0 { b } else { -b };
        }
        h_prime[j] = h[j]
            .checked_add(binomial(n, j)?.checked_mul(alt).ok_or_else(overflow)?)
            .ok_or_else(overflow)?;
    }
    let mut h_pp = h_prime.clone();
    for j in 1..n {
        h_pp[j] = h_prime[j] - binomial(n, j)? * betti_tilde[j - 1];
    }
    Ok(SimplicialStats {
        n,
        f,
        h,
        h_prime,
        h_pp,
        betti_tilde,
    })
}
