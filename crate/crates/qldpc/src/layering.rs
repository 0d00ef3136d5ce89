//! Layers, layer decompositions and t-covers of check sets.
//!
//! A *layer* is a set of checks whose row supports are pairwise
//! disjoint, so a partly-parallel architecture can process them in one
//! step without memory conflicts. A *(t, k, γ)-cover* is a family of k
//! layers covering each check exactly t times with layer sizes balanced
//! within a factor γ; t = 1 recovers an ordinary layer decomposition.
//!
//! Besides validation and lower bounds, this module provides a greedy
//! decomposition for arbitrary matrices, the product construction that
//! lifts decompositions of `A` and `Bᵗ` to a minimal decomposition of
//! the hypergraph product matrix `H_X`, the concrete component layers
//! used for the C2 code, and the 7-layer 2-cover of the B1 code.

use crate::gf2::SparseBinaryMatrix;
use std::fs;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input is a {t}-cover, expected a layer decomposition (t = 1)")]
    NotADecomposition { t: usize },
    #[error("check {check} is covered {count} times, expected exactly {expected}")]
    BadCoverage {
        check: usize,
        count: usize,
        expected: usize,
    },
    #[error("sigma is not a permutation of 0..{k}")]
    BadPermutation { k: usize },
    #[error("check count {m} is not divisible by 7")]
    NotDivisibleBySeven { m: usize },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("cover file line {line}: {message}")]
    BadCoverFile { line: usize, message: String },
}

/// A family of `k` check-index sets covering each of `m` checks exactly
/// `t` times (at most once per layer).
///
/// The struct itself is a plain container; whether the sets really form
/// a valid cover of a given matrix is established by [`validate_cover`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerCover {
    pub t: usize,
    pub m: usize,
    pub layers: Vec<Vec<usize>>,
}

impl LayerCover {
    pub fn new(t: usize, m: usize, layers: Vec<Vec<usize>>) -> Self {
        Self { t, m, layers }
    }

    /// Number of layers.
    pub fn k(&self) -> usize {
        self.layers.len()
    }

    /// The fractional layer number k/t: the average number of layer
    /// applications needed to see each check once.
    pub fn fractional_layer_number(&self) -> f64 {
        self.k() as f64 / self.t as f64
    }

    /// The serial-schedule cover: every check in its own layer.
    pub fn singletons(m: usize) -> Self {
        Self::new(1, m, (0..m).map(|c| vec![c]).collect())
    }

    /// Parses the plain-text cover format: a `t k m` header line, then
    /// one line of space-separated check indices per layer (blank lines
    /// are empty layers).
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut lines = text.lines().enumerate();
        let (line_no, header) = lines
            .next()
            .ok_or_else(|| Error::BadCoverFile {
                line: 1,
                message: "empty file, expected a \"t k m\" header".into(),
            })
            .map(|(i, l)| (i + 1, l))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::BadCoverFile {
                line: line_no,
                message: format!("expected \"t k m\", got {:?}", header.trim()),
            });
        }
        let parse = |token: &str, line: usize| -> Result<usize, Error> {
            token.parse().map_err(|_| Error::BadCoverFile {
                line,
                message: format!("expected integer, got {token:?}"),
            })
        };
        let t = parse(fields[0], line_no)?;
        let k = parse(fields[1], line_no)?;
        let m = parse(fields[2], line_no)?;
        let mut layers = Vec::with_capacity(k);
        for _ in 0..k {
            let (idx, raw) = lines.next().ok_or_else(|| Error::BadCoverFile {
                line: text.lines().count(),
                message: format!("expected {k} layer lines"),
            })?;
            let mut layer = Vec::new();
            for token in raw.split_whitespace() {
                layer.push(parse(token, idx + 1)?);
            }
            layers.push(layer);
        }
        Ok(Self::new(t, m, layers))
    }

    /// Renders the cover in the format accepted by [`LayerCover::parse`].
    pub fn format(&self) -> String {
        let mut out = format!("{} {} {}\n", self.t, self.k(), self.m);
        for layer in &self.layers {
            let entries: Vec<String> = layer.iter().map(|c| c.to_string()).collect();
            out.push_str(&entries.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn read_from<P: AsRef<Path>>(path: P) -> Result<Self, Error> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn write_to<P: AsRef<Path>>(&self, path: P) -> Result<(), Error> {
        fs::write(path, self.format())?;
        Ok(())
    }
}

/// Validation summary of a cover against a matrix.
#[derive(Debug, Clone)]
pub struct CoverReport {
    pub t: usize,
    pub k: usize,
    /// Tightest balance: max over pairs of nonempty layers of the size
    /// ratio. 1.0 when at most one nonempty layer exists.
    pub gamma: f64,
    /// Fractional layer number k/t.
    pub fractional: f64,
    pub valid: bool,
    /// Density lower bound on the fractional layer number of any valid
    /// cover of the matrix.
    pub lower_bound: usize,
    pub max_layer_size: usize,
    pub min_layer_size: usize,
    /// Human-readable descriptions of the violations found.
    pub violations: Vec<String>,
}

/// Whether the given checks have pairwise disjoint row supports.
pub fn is_layer(h: &SparseBinaryMatrix, checks: &[usize]) -> bool {
    let mut seen = vec![false; h.n_cols()];
    for &c in checks {
        assert!(c < h.n_rows(), "check index {c} out of range");
        for &v in h.row(c) {
            if seen[v] {
                return false;
            }
            seen[v] = true;
        }
    }
    true
}

/// Checks a cover against a matrix: every layer conflict-free, every
/// check covered exactly `t` times, and computes the balance and the
/// density bound.
pub fn validate_cover(h: &SparseBinaryMatrix, cover: &LayerCover) -> CoverReport {
    let m = h.n_rows();
    let mut violations = Vec::new();
    if cover.t == 0 {
        violations.push("cover multiplicity t must be at least 1".to_string());
    }
    if cover.m != m {
        violations.push(format!(
            "cover declares {} checks but the matrix has {m} rows",
            cover.m
        ));
    }

    let mut counts = vec![0usize; m];
    // Stamp buffers shared across layers: `stamp[x] == epoch` marks x as
    // seen in the current layer.
    let mut var_stamp = vec![usize::MAX; h.n_cols()];
    let mut check_stamp = vec![usize::MAX; m];
    for (epoch, layer) in cover.layers.iter().enumerate() {
        let mut conflict_reported = false;
        for &c in layer {
            if c >= m {
                violations.push(format!("layer {epoch}: check {c} out of range"));
                continue;
            }
            if check_stamp[c] == epoch {
                violations.push(format!("layer {epoch}: check {c} appears twice"));
                continue;
            }
            check_stamp[c] = epoch;
            counts[c] += 1;
            for &v in h.row(c) {
                if var_stamp[v] == epoch && !conflict_reported {
                    violations.push(format!(
                        "layer {epoch}: checks share variable {v}, supports are not disjoint"
                    ));
                    conflict_reported = true;
                }
                var_stamp[v] = epoch;
            }
        }
    }
    if cover.m == m {
        if let Some(check) = counts.iter().position(|&count| count != cover.t) {
            violations.push(format!(
                "check {check} is covered {} times, expected exactly {}",
                counts[check], cover.t
            ));
        }
    }

    let sizes: Vec<usize> = cover
        .layers
        .iter()
        .map(Vec::len)
        .filter(|&s| s > 0)
        .collect();
    let max_layer_size = sizes.iter().copied().max().unwrap_or(0);
    let min_layer_size = sizes.iter().copied().min().unwrap_or(0);
    let gamma = if min_layer_size > 0 {
        max_layer_size as f64 / min_layer_size as f64
    } else {
        1.0
    };

    CoverReport {
        t: cover.t,
        k: cover.k(),
        gamma,
        fractional: cover.fractional_layer_number(),
        valid: violations.is_empty(),
        lower_bound: density_bound(h),
        max_layer_size,
        min_layer_size,
        violations,
    }
}

/// Density lower bound on the fractional layer number of any valid
/// cover: `max(⌈ones/n⌉, max column weight)`.
///
/// Each layer marks at most `n` variable slots, so `k·n ≥ t·ones`; and
/// the checks meeting one variable must all land in distinct layers, `t`
/// times each, so `k ≥ t · max column weight`.
pub fn density_bound(h: &SparseBinaryMatrix) -> usize {
    let by_density = if h.n_cols() == 0 {
        0
    } else {
        h.num_ones().div_ceil(h.n_cols())
    };
    let by_column = (0..h.n_cols()).map(|c| h.col_weight(c)).max().unwrap_or(0);
    by_density.max(by_column)
}

/// Greedy layer decomposition via coloring of the check-conflict graph
/// (checks are adjacent when they share a variable), largest degree
/// first with smallest-available-color tie-breaking.
///
/// Always valid; uses at most `max conflict degree + 1` layers.
pub fn greedy_decompose(h: &SparseBinaryMatrix) -> LayerCover {
    let m = h.n_rows();
    let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); m];
    for c in 0..h.n_cols() {
        let support = h.col(c);
        for (i, &a) in support.iter().enumerate() {
            for &b in &support[i + 1..] {
                neighbors[a].push(b);
                neighbors[b].push(a);
            }
        }
    }
    for list in &mut neighbors {
        list.sort_unstable();
        list.dedup();
    }

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&c| (std::cmp::Reverse(neighbors[c].len()), c));

    let mut color = vec![usize::MAX; m];
    let mut used = Vec::new();
    let mut k = 0;
    for &c in &order {
        used.clear();
        used.resize(k + 1, false);
        for &nb in &neighbors[c] {
            if color[nb] != usize::MAX && color[nb] < used.len() {
                used[color[nb]] = true;
            }
        }
        let chosen = used.iter().position(|&u| !u).expect("one color always free");
        color[c] = chosen;
        k = k.max(chosen + 1);
    }

    let mut layers = vec![Vec::new(); k];
    for (check, &col) in color.iter().enumerate() {
        layers[col].push(check);
    }
    LayerCover::new(1, m, layers)
}

/// The 5-layer decomposition of the length-31 circulant with exponents
/// {0, 2, 5} used as the component decomposition for the C2 code. Layer
/// sizes (8, 8, 5, 5, 5).
pub fn c2_component_layers() -> LayerCover {
    LayerCover::new(
        1,
        31,
        vec![
            vec![0, 1, 7, 8, 14, 15, 21, 22],
            vec![2, 3, 9, 10, 16, 17, 23, 24],
            vec![4, 11, 18, 25, 29],
            vec![5, 12, 19, 26, 30],
            vec![6, 13, 20, 27, 28],
        ],
    )
}

/// Lifts layer decompositions of `A` and `Bᵗ` to a decomposition of the
/// hypergraph product matrix `H_X` in `k = max(k_A, k_Bt)` layers.
///
/// The smaller decomposition is padded with empty layers to length `k`.
/// The `H_X` row pairing row `a` of `A` with row `b` of `Bᵗ` (index
/// `a·m_Bt + b`) goes into layer `i` exactly when `a ∈ A_σ(j)` and
/// `b ∈ Bᵗ_{(j+i) mod k}` for some `j`; `sigma = None` means the
/// identity. The row count of the result is `m_A · m_Bt`.
pub fn hgp_layers(
    decomp_a: &LayerCover,
    decomp_bt: &LayerCover,
    sigma: Option<&[usize]>,
) -> Result<LayerCover, Error> {
    let k = decomp_a.k().max(decomp_bt.k());
    let layer_of_a = partition_index(decomp_a)?;
    let layer_of_b = partition_index(decomp_bt)?;

    let identity: Vec<usize>;
    let sigma = match sigma {
        Some(s) => s,
        None => {
            identity = (0..k).collect();
            &identity
        }
    };
    if sigma.len() != k {
        return Err(Error::BadPermutation { k });
    }
    let mut sigma_inv = vec![usize::MAX; k];
    for (j, &s) in sigma.iter().enumerate() {
        if s >= k || sigma_inv[s] != usize::MAX {
            return Err(Error::BadPermutation { k });
        }
        sigma_inv[s] = j;
    }

    let m_bt = decomp_bt.m;
    let mut layers = vec![Vec::new(); k];
    for (a, &la) in layer_of_a.iter().enumerate() {
        let j = sigma_inv[la];
        for (b, &lb) in layer_of_b.iter().enumerate() {
            let i = (lb + k - j) % k;
            layers[i].push(a * m_bt + b);
        }
    }
    Ok(LayerCover::new(1, decomp_a.m * m_bt, layers))
}

// Maps each check to its unique layer, rejecting anything that is not a
// partition.
fn partition_index(decomp: &LayerCover) -> Result<Vec<usize>, Error> {
    if decomp.t != 1 {
        return Err(Error::NotADecomposition { t: decomp.t });
    }
    let mut layer_of = vec![usize::MAX; decomp.m];
    for (l, layer) in decomp.layers.iter().enumerate() {
        for &c in layer {
            if c >= decomp.m {
                return Err(Error::BadCoverage {
                    check: c,
                    count: 0,
                    expected: 1,
                });
            }
            if layer_of[c] != usize::MAX {
                return Err(Error::BadCoverage {
                    check: c,
                    count: 2,
                    expected: 1,
                });
            }
            layer_of[c] = l;
        }
    }
    if let Some(check) = layer_of.iter().position(|&l| l == usize::MAX) {
        return Err(Error::BadCoverage {
            check,
            count: 0,
            expected: 1,
        });
    }
    Ok(layer_of)
}

/// The 7-layer 2-cover of the B1 code's checks:
/// `L_i = {i + 7j} ∪ {3 + i + 7j}`, i.e. layer `i` holds the checks
/// with index ≡ i or i+3 (mod 7). Each check lands in exactly two
/// layers and all layers have size 2m/7.
pub fn b1_cover(m: usize) -> Result<LayerCover, Error> {
    if !m.is_multiple_of(7) {
        return Err(Error::NotDivisibleBySeven { m });
    }
    let layers = (0..7)
        .map(|i| {
            (0..m)
                .filter(|&c| c % 7 == i || c % 7 == (i + 3) % 7)
                .collect()
        })
        .collect();
    Ok(LayerCover::new(2, m, layers))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::css::build_c2;
    use crate::decoder::Lcg;

    #[test]
    fn is_layer_examples() {
        let h = SparseBinaryMatrix::from_rows(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        assert!(!is_layer(&h, &[0, 1]));
        assert!(is_layer(&h, &[0]));
        assert!(is_layer(&h, &[1]));
    }

    #[test]
    fn c2_component_table_is_valid() {
        let a = SparseBinaryMatrix::circulant(&[0, 2, 5], 31).unwrap();
        let decomp = c2_component_layers();
        assert_eq!(decomp.layers[0], vec![0, 1, 7, 8, 14, 15, 21, 22]);
        assert_eq!(decomp.layers[2], vec![4, 11, 18, 25, 29]);
        let report = validate_cover(&a, &decomp);
        assert!(report.valid, "{:?}", report.violations);
        assert_eq!(report.t, 1);
        assert_eq!(report.k, 5);
        assert_eq!(report.max_layer_size, 8);
        assert_eq!(report.min_layer_size, 5);
        assert_eq!(report.gamma, 8.0 / 5.0);
        // The transposed circulant accepts the same component layers.
        let report_t = validate_cover(&a.transposed(), &decomp);
        assert!(report_t.valid, "{:?}", report_t.violations);
    }

    #[test]
    fn c2_product_layers() {
        let decomp = c2_component_layers();
        let product = hgp_layers(&decomp, &decomp, None).unwrap();
        assert_eq!(product.k(), 5);
        let sizes: Vec<usize> = product.layers.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![203, 194, 185, 185, 194]);

        let c2 = build_c2();
        let report = validate_cover(c2.h_x(), &product);
        assert!(report.valid, "{:?}", report.violations);
        assert!(is_layer(c2.h_x(), &product.layers[0]));
        assert_eq!(report.gamma, 203.0 / 185.0);
        assert!(report.gamma <= 1.1);
    }

    #[test]
    fn validate_rejects_duplicate_check() {
        let h = SparseBinaryMatrix::identity(3);
        let cover = LayerCover::new(1, 3, vec![vec![0, 0], vec![1, 2]]);
        let report = validate_cover(&h, &cover);
        assert!(!report.valid);
    }

    #[test]
    fn validate_rejects_wrong_multiplicity() {
        let h = SparseBinaryMatrix::identity(3);
        let cover = LayerCover::new(1, 3, vec![vec![0, 1], vec![1, 2]]);
        let report = validate_cover(&h, &cover);
        assert!(!report.valid);
        let degenerate = LayerCover::new(0, 3, vec![]);
        assert!(!validate_cover(&h, &degenerate).valid);
    }

    #[test]
    fn density_bound_examples() {
        assert_eq!(density_bound(&SparseBinaryMatrix::identity(4)), 1);
        let c2 = build_c2();
        assert_eq!(density_bound(c2.h_x()), 3);
    }

    #[test]
    fn greedy_examples() {
        let id = SparseBinaryMatrix::identity(5);
        let decomp = greedy_decompose(&id);
        assert_eq!(decomp.k(), 1);
        assert!(validate_cover(&id, &decomp).valid);

        let dense = SparseBinaryMatrix::from_rows(2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        let decomp = greedy_decompose(&dense);
        assert_eq!(decomp.k(), 2);
        assert!(validate_cover(&dense, &decomp).valid);

        let a = SparseBinaryMatrix::circulant(&[0, 2, 5], 31).unwrap();
        let decomp = greedy_decompose(&a);
        assert!(decomp.k() <= 7, "k = {}", decomp.k());
        assert!(validate_cover(&a, &decomp).valid);
    }

    #[test]
    fn hgp_layers_balanced_when_one_side_balanced() {
        // Identity rows never conflict, so any partition of them layers
        // the identity matrix. An equal-size partition is perfectly
        // balanced and forces a perfectly balanced product, whatever the
        // other side looks like.
        let balanced = LayerCover::new(1, 6, vec![vec![0, 1], vec![2, 3], vec![4, 5]]);
        let skewed = LayerCover::new(1, 6, vec![vec![0, 1, 2], vec![3, 4], vec![5]]);
        let product = hgp_layers(&balanced, &skewed, None).unwrap();
        assert_eq!(product.k(), 3);
        let sizes: Vec<usize> = product.layers.iter().map(Vec::len).collect();
        assert!(sizes.iter().all(|&s| s == sizes[0]), "sizes {sizes:?}");
    }

    #[test]
    fn hgp_layers_padding_keeps_larger_side_balance() {
        // k_A = 1 padded against a 2-layer side: the product inherits the
        // size profile of the larger side, within its balance.
        let single = LayerCover::new(1, 2, vec![vec![0, 1]]);
        let skewed = LayerCover::new(1, 3, vec![vec![0, 1], vec![2]]);
        let product = hgp_layers(&single, &skewed, None).unwrap();
        assert_eq!(product.k(), 2);
        let sizes: Vec<usize> = product.layers.iter().map(Vec::len).collect();
        let (max, min) = (
            *sizes.iter().max().unwrap() as f64,
            *sizes.iter().min().unwrap() as f64,
        );
        assert!(max / min <= 2.0);
    }

    #[test]
    fn hgp_layers_rejects_bad_inputs() {
        let good = LayerCover::new(1, 2, vec![vec![0], vec![1]]);
        let cover_t2 = LayerCover::new(2, 2, vec![vec![0, 1], vec![0, 1]]);
        assert!(matches!(
            hgp_layers(&cover_t2, &good, None),
            Err(Error::NotADecomposition { .. })
        ));
        let missing = LayerCover::new(1, 2, vec![vec![0]]);
        assert!(matches!(
            hgp_layers(&missing, &good, None),
            Err(Error::BadCoverage { .. })
        ));
        assert!(matches!(
            hgp_layers(&good, &good, Some(&[0, 0])),
            Err(Error::BadPermutation { .. })
        ));
    }

    #[test]
    fn hgp_layers_random_sigma_still_valid() {
        let a = SparseBinaryMatrix::circulant(&[0, 1], 6).unwrap();
        let da = greedy_decompose(&a);
        let dbt = greedy_decompose(&a.transposed());
        let k = da.k().max(dbt.k());
        let mut rng = Lcg::new(11);
        for _ in 0..5 {
            let sigma = crate::decoder::sample_layer_order(k, &mut rng, None, None).0;
            let product = hgp_layers(&da, &dbt, Some(&sigma)).unwrap();
            let h_x = crate::css::hypergraph_product(&a, &a).h_x().clone();
            let report = validate_cover(&h_x, &product);
            assert!(report.valid, "{:?}", report.violations);
            assert_eq!(product.k(), k);
        }
    }

    #[test]
    fn restriction_recovers_component_decomposition() {
        // Fixing a row a of A and restricting the H_X layers to the rows
        // {a ⊛ b : all b} induces a valid decomposition of Bᵗ in at most
        // as many layers.
        let a = SparseBinaryMatrix::circulant(&[0, 2, 5], 31).unwrap();
        let decomp = c2_component_layers();
        let product = hgp_layers(&decomp, &decomp, None).unwrap();
        let bt = a.transposed();
        for a_row in [0usize, 13, 30] {
            let mut induced = Vec::new();
            for layer in &product.layers {
                let restricted: Vec<usize> = layer
                    .iter()
                    .filter(|&&idx| idx / 31 == a_row)
                    .map(|&idx| idx % 31)
                    .collect();
                if !restricted.is_empty() {
                    induced.push(restricted);
                }
            }
            assert!(induced.len() <= product.k());
            let cover = LayerCover::new(1, 31, induced);
            assert!(validate_cover(&bt, &cover).valid);
        }
    }

    #[test]
    fn residue_cover_is_valid_for_weight_three_circulant() {
        // The length-63 circulant with exponents {0,1,6} splits into the
        // seven residue classes mod 7, and the union of classes three
        // apart is still conflict-free, so the residue-pair layers form
        // a valid (2,7,1)-cover of the matrix itself.
        let h = SparseBinaryMatrix::circulant(&[0, 1, 6], 63).unwrap();
        let residues = LayerCover::new(
            1,
            63,
            (0..7).map(|i| (0..63).filter(|c| c % 7 == i).collect()).collect(),
        );
        let report = validate_cover(&h, &residues);
        assert!(report.valid, "{:?}", report.violations);
        assert_eq!(report.k, 7);

        let cover = b1_cover(63).unwrap();
        let report = validate_cover(&h, &cover);
        assert!(report.valid, "{:?}", report.violations);
        assert_eq!(report.t, 2);
        assert_eq!(report.k, 7);
        assert_eq!(report.gamma, 1.0);
        assert_eq!(report.fractional, 3.5);
        assert_eq!(report.max_layer_size, 18);
        assert!(report.fractional >= report.lower_bound as f64);
    }

    #[test]
    fn b1_cover_structure() {
        let cover = b1_cover(441).unwrap();
        assert_eq!(cover.t, 2);
        assert_eq!(cover.k(), 7);
        for layer in &cover.layers {
            assert_eq!(layer.len(), 126);
        }
        assert_eq!(cover.fractional_layer_number(), 3.5);
        // Check 10 ≡ 3 (mod 7): member of L_3 and of L_0 (0 + 3 = 3).
        assert!(cover.layers[3].contains(&10));
        assert!(cover.layers[0].contains(&10));
        assert!(matches!(
            b1_cover(440),
            Err(Error::NotDivisibleBySeven { .. })
        ));
    }

    #[test]
    fn cover_file_round_trip() {
        let cover = LayerCover::new(2, 7, vec![vec![0, 3], vec![1, 4], vec![], vec![2, 5, 6]]);
        let text = cover.format();
        assert_eq!(LayerCover::parse(&text).unwrap(), cover);
        assert!(matches!(
            LayerCover::parse("1 2\n0\n1\n"),
            Err(Error::BadCoverFile { .. })
        ));
    }
}
