//! Immutable interned compositions and the decay-line cache.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use super::decay::decay_fractions;
use super::nuclide::{NuclideId, NuclideTable};
use super::ResourceError;

/// Interned composition handle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CompId(pub u32);

impl fmt::Display for CompId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Inputs whose fractions sum this close to one are accepted untouched.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Inputs further than this from one are rejected; in between they are
/// renormalized with a warning.
pub const AUTO_NORMALIZE_TOL: f64 = 1e-6;

/// Mass-fraction vector, sorted by nuclide, all entries strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Composition {
    id: CompId,
    fractions: Vec<(NuclideId, f64)>,
}

impl Composition {
    pub fn id(&self) -> CompId {
        self.id
    }

    pub fn fractions(&self) -> &[(NuclideId, f64)] {
        &self.fractions
    }

    pub fn mass_frac(&self, nuc: NuclideId) -> f64 {
        self.fractions
            .binary_search_by_key(&nuc, |e| e.0)
            .map_or(0.0, |i| self.fractions[i].1)
    }

    /// Summed mass fraction of all isotopes of element `z`.
    pub fn element_frac(&self, z: u32) -> f64 {
        self.fractions
            .iter()
            .filter(|(n, _)| n.z() == z)
            .map(|e| e.1)
            .sum()
    }

    pub fn to_map(&self) -> BTreeMap<NuclideId, f64> {
        self.fractions.iter().copied().collect()
    }
}

type InternKey = Vec<(NuclideId, u64)>;

/// Append-only store of compositions.
///
/// Each composition may carry decay edges `(Δt, child)`; following edges
/// reproduces earlier decay results without recomputation.
#[derive(Debug, Clone)]
pub struct CompositionStore {
    table: Arc<NuclideTable>,
    comps: Vec<Composition>,
    index: HashMap<InternKey, CompId>,
    decay_edges: Vec<Vec<(u64, CompId)>>,
    decay_computations: usize,
    fresh: Vec<CompId>,
}

impl CompositionStore {
    pub fn new(table: Arc<NuclideTable>) -> Self {
        CompositionStore {
            table,
            comps: Vec::new(),
            index: HashMap::new(),
            decay_edges: Vec::new(),
            decay_computations: 0,
            fresh: Vec::new(),
        }
    }

    pub fn table(&self) -> &NuclideTable {
        &self.table
    }

    pub fn table_arc(&self) -> Arc<NuclideTable> {
        Arc::clone(&self.table)
    }

    pub fn get(&self, id: CompId) -> &Composition {
        &self.comps[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    /// Number of decay solutions computed so far (cache misses).
    pub fn decay_computations(&self) -> usize {
        self.decay_computations
    }

    /// Compositions created since the last call, in creation order.
    pub fn drain_fresh(&mut self) -> Vec<CompId> {
        std::mem::take(&mut self.fresh)
    }

    /// Intern user-supplied fractions. Returns a warning message when the
    /// input had to be renormalized.
    pub fn intern_input<I>(&mut self, fractions: I) -> Result<(CompId, Option<String>), ResourceError>
    where
        I: IntoIterator<Item = (NuclideId, f64)>,
    {
        let mut merged: BTreeMap<NuclideId, f64> = BTreeMap::new();
        for (n, f) in fractions {
            if !f.is_finite() || f < 0.0 {
                return Err(ResourceError::InvalidComposition(format!(
                    "fraction {f} for {n}"
                )));
            }
            *merged.entry(n).or_insert(0.0) += f;
        }
        merged.retain(|_, f| *f > 0.0);
        if merged.is_empty() {
            return Err(ResourceError::EmptyComposition);
        }
        let total: f64 = merged.values().sum();
        let off = (total - 1.0).abs();
        if off > AUTO_NORMALIZE_TOL {
            return Err(ResourceError::InvalidComposition(format!(
                "fractions sum to {total}"
            )));
        }
        let warning = (off > NORMALIZATION_TOL)
            .then(|| format!("composition renormalized from a total of {total}"));
        Ok((self.intern_map(merged)?, warning))
    }

    /// Intern an arbitrary non-negative vector after normalizing it.
    pub fn intern_map(&mut self, mut map: BTreeMap<NuclideId, f64>) -> Result<CompId, ResourceError> {
        map.retain(|_, f| *f > 0.0);
        let total: f64 = map.values().sum();
        if map.is_empty() || !(total > 0.0) || !total.is_finite() {
            return Err(ResourceError::EmptyComposition);
        }
        let fractions: Vec<(NuclideId, f64)> = if (total - 1.0).abs() <= NORMALIZATION_TOL * 0.25 {
            map.into_iter().collect()
        } else {
            map.into_iter().map(|(n, f)| (n, f / total)).collect()
        };
        Ok(self.intern_sorted(fractions))
    }

    fn intern_sorted(&mut self, fractions: Vec<(NuclideId, f64)>) -> CompId {
        let key: InternKey = fractions.iter().map(|&(n, f)| (n, f.to_bits())).collect();
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let id = CompId(self.comps.len() as u32);
        self.comps.push(Composition { id, fractions });
        self.decay_edges.push(Vec::new());
        self.index.insert(key, id);
        self.fresh.push(id);
        id
    }

    /// Direct single-shot decay of `comp` by `dt` months, bypassing the cache.
    pub fn decay_direct(&mut self, comp: CompId, dt: u64) -> CompId {
        if dt == 0 {
            return comp;
        }
        let decayed = decay_fractions(&self.table, self.get(comp).fractions(), dt as f64);
        self.intern_map(decayed)
            .expect("decay preserves a non-empty composition")
    }

    /// Decay `comp` by `dt` months, reusing cached decay edges.
    ///
    /// Follows the longest cached edge that fits the remaining time until
    /// none fits, then computes the leftover interval once and records it as
    /// a new edge from the last composition reached.
    pub fn decay_cached(&mut self, comp: CompId, dt: u64) -> CompId {
        let mut cur = comp;
        let mut remaining = dt;
        while remaining > 0 {
            let next = self.decay_edges[cur.0 as usize]
                .iter()
                .filter(|(step, _)| *step <= remaining)
                .max_by_key(|(step, _)| *step)
                .copied();
            match next {
                Some((step, child)) => {
                    cur = child;
                    remaining -= step;
                }
                None => break,
            }
        }
        if remaining == 0 {
            return cur;
        }
        self.decay_computations += 1;
        let child = self.decay_direct(cur, remaining);
        if child != cur {
            self.decay_edges[cur.0 as usize].push((remaining, child));
        }
        child
    }

    /// Cached decay edges leaving `comp`.
    pub fn decay_edges(&self, comp: CompId) -> &[(u64, CompId)] {
        &self.decay_edges[comp.0 as usize]
    }
}
