//! Code construction: parameters, coordinate maps, encoders, and
//! brute-force distance properties of SPC product codes.
//!
//! A spec is the list of component lengths `n_1..n_m`. Codewords are
//! `n_1 x ... x n_m` arrays; every axis-aligned line has even parity. Each
//! local SPC code keeps its information bits in the first `n_l - 1` slots
//! of its line and the parity bit in the last slot.
//!
//! Two serializations are fixed once and used everywhere:
//!
//! - **codeword order**: mixed radix over the coordinates with dimension 0
//!   varying fastest, so each level-0 local code occupies `n_1` consecutive
//!   positions;
//! - **message order**: lexicographic over the information coordinates with
//!   dimension 0 most significant and dimension `m-1` fastest. This equals
//!   the row order of the Kronecker-product generator matrix and is the
//!   order in which successive cancellation decides bits.

use crate::gf2::BinMatrix;
use crate::{Error, Result};

/// Largest code dimension accepted by [`min_distance_bruteforce`].
pub const BRUTE_FORCE_K_LIMIT: usize = 20;

/// An `m`-dimensional product of single parity-check codes, with all
/// derived parameters and index maps precomputed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductCodeSpec {
    component_lengths: Vec<usize>,
    block_length: usize,
    dimension: usize,
    /// Codeword strides: `cw_strides[l] = n_0 * ... * n_{l-1}`.
    cw_strides: Vec<usize>,
    /// Message strides: `msg_strides[l] = (n_{l+1}-1) * ... * (n_{m-1}-1)`.
    msg_strides: Vec<usize>,
    /// Local SPC code count per level.
    local_code_counts: Vec<usize>,
}

impl ProductCodeSpec {
    /// Validate component lengths and derive all parameters.
    ///
    /// Requires at least one component and every length at least 2.
    pub fn new(component_lengths: &[usize]) -> Result<ProductCodeSpec> {
        if component_lengths.is_empty() {
            return Err(Error::InvalidSpec("at least one component length required".into()));
        }
        if let Some(&bad) = component_lengths.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidSpec(format!(
                "component lengths must be at least 2, got {bad}"
            )));
        }
        let m = component_lengths.len();

        let mut block_length = 1usize;
        let mut dimension = 1usize;
        let mut cw_strides = Vec::with_capacity(m);
        for &n in component_lengths {
            cw_strides.push(block_length);
            block_length = block_length
                .checked_mul(n)
                .ok_or_else(|| Error::InvalidSpec("block length overflows usize".into()))?;
            dimension *= n - 1;
        }

        let mut msg_strides = vec![1usize; m];
        for l in (0..m.saturating_sub(1)).rev() {
            msg_strides[l] = msg_strides[l + 1] * (component_lengths[l + 1] - 1);
        }

        let local_code_counts = (0..m)
            .map(|l| {
                let below: usize = component_lengths[..l].iter().map(|n| n - 1).product();
                let above: usize = component_lengths[l + 1..].iter().product();
                below * above
            })
            .collect();

        Ok(ProductCodeSpec {
            component_lengths: component_lengths.to_vec(),
            block_length,
            dimension,
            cw_strides,
            msg_strides,
            local_code_counts,
        })
    }

    /// Component lengths `n_1..n_m`, level 0 first (channel-adjacent).
    pub fn component_lengths(&self) -> &[usize] {
        &self.component_lengths
    }

    /// Number of dimensions (levels) `m`.
    pub fn num_levels(&self) -> usize {
        self.component_lengths.len()
    }

    /// Block length `n`, the product of the component lengths.
    pub fn block_length(&self) -> usize {
        self.block_length
    }

    /// Code dimension `k`, the product of `n_l - 1`.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Code rate `k / n`.
    pub fn rate(&self) -> f64 {
        self.dimension as f64 / self.block_length as f64
    }

    /// Minimum distance `2^m` (every component has distance 2).
    pub fn min_distance(&self) -> usize {
        1usize << self.num_levels()
    }

    /// Number of minimum-weight codewords, the product of the per-level
    /// counts `C(n_l, 2)`.
    pub fn min_distance_multiplicity(&self) -> u64 {
        self.component_lengths
            .iter()
            .map(|&n| (n * (n - 1) / 2) as u64)
            .try_fold(1u64, |acc, a| acc.checked_mul(a))
            .expect("multiplicity overflows u64")
    }

    /// Number of local SPC codes per level (level 0 first).
    pub fn local_code_counts(&self) -> &[usize] {
        &self.local_code_counts
    }

    /// Codeword strides of the coordinate map (dimension 0 fastest).
    pub(crate) fn codeword_strides(&self) -> &[usize] {
        &self.cw_strides
    }

    /// Serialized position of a coordinate tuple (`coords[l]` in
    /// `0..n_l`). Panics on out-of-range coordinates.
    pub fn codeword_index(&self, coords: &[usize]) -> usize {
        assert_eq!(coords.len(), self.num_levels(), "coordinate arity mismatch");
        coords
            .iter()
            .zip(&self.component_lengths)
            .zip(&self.cw_strides)
            .map(|((&c, &n), &s)| {
                assert!(c < n, "coordinate {c} out of range for component length {n}");
                c * s
            })
            .sum()
    }

    /// Inverse of [`codeword_index`](Self::codeword_index).
    pub fn codeword_coords(&self, index: usize) -> Vec<usize> {
        assert!(index < self.block_length, "codeword index {index} out of range");
        let mut rest = index;
        self.component_lengths
            .iter()
            .map(|&n| {
                let c = rest % n;
                rest /= n;
                c
            })
            .collect()
    }

    /// True iff the tuple addresses an information position: every
    /// coordinate avoids its level's parity slot `n_l - 1`.
    pub fn is_info_coords(&self, coords: &[usize]) -> bool {
        assert_eq!(coords.len(), self.num_levels(), "coordinate arity mismatch");
        coords
            .iter()
            .zip(&self.component_lengths)
            .all(|(&c, &n)| c < n - 1)
    }

    /// Message index of an information tuple. This is also the successive
    /// cancellation decoding order. Panics if the tuple is not an
    /// information position.
    pub fn message_index(&self, coords: &[usize]) -> usize {
        assert!(self.is_info_coords(coords), "not an information tuple: {coords:?}");
        coords.iter().zip(&self.msg_strides).map(|(&c, &s)| c * s).sum()
    }

    /// Inverse of [`message_index`](Self::message_index).
    pub fn message_coords(&self, index: usize) -> Vec<usize> {
        assert!(index < self.dimension, "message index {index} out of range");
        self.component_lengths
            .iter()
            .zip(&self.msg_strides)
            .map(|(&n, &s)| (index / s) % (n - 1))
            .collect()
    }

    /// Serialized codeword position carrying message bit `index`.
    pub fn message_cell(&self, index: usize) -> usize {
        self.codeword_index(&self.message_coords(index))
    }
}

/// Encode a message, filling parity level by level from the message side
/// (level `m-1`) to the channel side (level 0).
pub fn encode(spec: &ProductCodeSpec, message: &[u8]) -> Result<Vec<u8>> {
    let order: Vec<usize> = (0..spec.num_levels()).rev().collect();
    encode_in_order(spec, message, &order)
}

/// Encode with the per-level parity fills applied in an arbitrary level
/// order. All orders produce the same codeword (checks on checks agree);
/// [`encode`] is the canonical one.
pub fn encode_in_order(spec: &ProductCodeSpec, message: &[u8], level_order: &[usize]) -> Result<Vec<u8>> {
    let m = spec.num_levels();
    if message.len() != spec.dimension() {
        return Err(Error::LengthMismatch {
            expected: spec.dimension(),
            got: message.len(),
        });
    }
    {
        let mut seen = vec![false; m];
        for &l in level_order {
            if l >= m || seen[l] {
                return Err(Error::InvalidParameter(format!(
                    "level order must be a permutation of 0..{m}"
                )));
            }
            seen[l] = true;
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::InvalidParameter(format!(
                "level order must be a permutation of 0..{m}"
            )));
        }
    }

    let mut cw = vec![0u8; spec.block_length()];
    for (t, &bit) in message.iter().enumerate() {
        cw[spec.message_cell(t)] = bit & 1;
    }

    // Cells already determined: info coordinates in unprocessed dimensions,
    // full range in processed ones.
    let mut processed = vec![false; m];
    for &level in level_order {
        let n_l = spec.component_lengths()[level];
        let stride = spec.codeword_strides()[level];
        // Iterate over all lines along `level` whose other coordinates are
        // currently determined.
        let radices: Vec<usize> = (0..m)
            .map(|i| {
                if i == level {
                    1
                } else if processed[i] {
                    spec.component_lengths()[i]
                } else {
                    spec.component_lengths()[i] - 1
                }
            })
            .collect();
        for_each_mixed_radix(&radices, spec.codeword_strides(), |base| {
            let mut parity = 0u8;
            for pos in 0..n_l - 1 {
                parity ^= cw[base + pos * stride];
            }
            cw[base + (n_l - 1) * stride] = parity;
        });
        processed[level] = true;
    }
    Ok(cw)
}

/// True iff `codeword` satisfies every local parity constraint: for every
/// level and every line along it, the bits XOR to zero.
pub fn verify_codeword(spec: &ProductCodeSpec, codeword: &[u8]) -> bool {
    if codeword.len() != spec.block_length() {
        return false;
    }
    let m = spec.num_levels();
    for level in 0..m {
        let n_l = spec.component_lengths()[level];
        let stride = spec.codeword_strides()[level];
        let radices: Vec<usize> = (0..m)
            .map(|i| if i == level { 1 } else { spec.component_lengths()[i] })
            .collect();
        let mut ok = true;
        for_each_mixed_radix(&radices, spec.codeword_strides(), |base| {
            let mut parity = 0u8;
            for pos in 0..n_l {
                parity ^= codeword[base + pos * stride] & 1;
            }
            ok &= parity == 0;
        });
        if !ok {
            return false;
        }
    }
    true
}

/// Visit `base = sum(digit_i * stride_i)` for every digit tuple of the
/// given mixed radix, digit 0 fastest.
pub(crate) fn for_each_mixed_radix(radices: &[usize], strides: &[usize], mut f: impl FnMut(usize)) {
    let total: usize = radices.iter().product();
    let mut digits = vec![0usize; radices.len()];
    let mut base = 0usize;
    for _ in 0..total {
        f(base);
        for (i, d) in digits.iter_mut().enumerate() {
            *d += 1;
            base += strides[i];
            if *d < radices[i] {
                break;
            }
            base -= radices[i] * strides[i];
            *d = 0;
        }
    }
}

/// As [`for_each_mixed_radix`], but tracking the same digit tuple under
/// two stride sets at once.
pub(crate) fn for_each_mixed_radix_pair(
    radices: &[usize],
    strides_a: &[usize],
    strides_b: &[usize],
    mut f: impl FnMut(usize, usize),
) {
    let total: usize = radices.iter().product();
    let mut digits = vec![0usize; radices.len()];
    let (mut base_a, mut base_b) = (0usize, 0usize);
    for _ in 0..total {
        f(base_a, base_b);
        for (i, d) in digits.iter_mut().enumerate() {
            *d += 1;
            base_a += strides_a[i];
            base_b += strides_b[i];
            if *d < radices[i] {
                break;
            }
            base_a -= radices[i] * strides_a[i];
            base_b -= radices[i] * strides_b[i];
            *d = 0;
        }
    }
}

/// Strides of a mixed-radix layout with digit 0 fastest.
pub(crate) fn strides_of(radices: &[usize]) -> Vec<usize> {
    let mut s = Vec::with_capacity(radices.len());
    let mut acc = 1usize;
    for &r in radices {
        s.push(acc);
        acc *= r;
    }
    s
}

/// The `k x n` generator matrix: the Kronecker product of the per-level
/// SPC generators `[I | 1]`, with columns permuted to the codeword
/// serialization. Under the message order of [`ProductCodeSpec`] the row
/// permutation is the identity, so `msg . G` equals [`encode`] directly.
pub fn generator_matrix(spec: &ProductCodeSpec) -> BinMatrix {
    let spc_gen = |n: usize| BinMatrix::from_fn(n - 1, n, |r, c| c == r || c == n - 1);

    let mut g = spc_gen(spec.component_lengths()[0]);
    for &n in &spec.component_lengths()[1..] {
        g = g.kronecker(&spc_gen(n));
    }

    // Kronecker column strides have dimension m-1 fastest; the codeword
    // serialization has dimension 0 fastest.
    let m = spec.num_levels();
    let mut kron_strides = vec![1usize; m];
    for l in (0..m.saturating_sub(1)).rev() {
        kron_strides[l] = kron_strides[l + 1] * spec.component_lengths()[l + 1];
    }
    let perm: Vec<usize> = (0..spec.block_length())
        .map(|c| {
            let coords = spec.codeword_coords(c);
            coords.iter().zip(&kron_strides).map(|(&ci, &s)| ci * s).sum()
        })
        .collect();
    g.permute_columns(&perm)
}

/// Minimum nonzero codeword weight and its multiplicity, by enumerating
/// all `2^k` codewords. Refuses when `k` exceeds [`BRUTE_FORCE_K_LIMIT`].
pub fn min_distance_bruteforce(spec: &ProductCodeSpec) -> Result<(usize, u64)> {
    let k = spec.dimension();
    if k > BRUTE_FORCE_K_LIMIT {
        return Err(Error::DistanceCap { k, limit: BRUTE_FORCE_K_LIMIT });
    }
    let mut best = usize::MAX;
    let mut count = 0u64;
    let mut message = vec![0u8; k];
    for bits in 1u64..(1u64 << k) {
        for (i, b) in message.iter_mut().enumerate() {
            *b = ((bits >> i) & 1) as u8;
        }
        let weight = encode(spec, &message)?.iter().map(|&b| b as usize).sum::<usize>();
        if weight < best {
            best = weight;
            count = 1;
        } else if weight == best {
            count += 1;
        }
    }
    Ok((best, count))
}
