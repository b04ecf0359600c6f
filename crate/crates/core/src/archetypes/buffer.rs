use std::collections::VecDeque;

use crate::kernel::{SimError, SimResult};
use crate::resources::{ResourceId, ResourceStore};

/// Quantities closer than this to a whole piece take the whole piece
/// rather than splitting off a sliver.
const PIECE_TOL: f64 = 1e-9;

/// FIFO inventory of resources owned by one agent.
///
/// With `homogeneous` set every push is absorbed into a single resource so
/// that any quantity taken has the average composition of the stock.
#[derive(Debug, Clone, Default)]
pub struct ResBuf {
    items: VecDeque<ResourceId>,
    homogeneous: bool,
}

impl ResBuf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn homogeneous() -> Self {
        ResBuf { items: VecDeque::new(), homogeneous: true }
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn ids(&self) -> impl Iterator<Item = ResourceId> + '_ {
        self.items.iter().copied()
    }

    pub fn front(&self) -> Option<ResourceId> {
        self.items.front().copied()
    }

    pub fn quantity(&self, res: &ResourceStore) -> f64 {
        self.items
            .iter()
            .map(|id| res.get(*id).map(|r| r.quantity).unwrap_or(0.0))
            .sum()
    }

    pub fn push(&mut self, res: &mut ResourceStore, id: ResourceId, at: u64) -> SimResult<()> {
        match (self.homogeneous, self.items.pop_back()) {
            (true, Some(prev)) => {
                let merged = res.absorb(prev, id, at)?;
                self.items.push_back(merged);
            }
            (_, prev) => {
                self.items.extend(prev);
                self.items.push_back(id);
            }
        }
        Ok(())
    }

    pub fn pop_front(&mut self) -> Option<ResourceId> {
        self.items.pop_front()
    }

    /// Put a resource back at the head of the queue.
    pub fn push_front(&mut self, id: ResourceId) {
        self.items.push_front(id);
    }

    /// Remove `qty` from the front, splitting the last piece as needed and
    /// absorbing the pieces into one resource.
    pub fn take(&mut self, res: &mut ResourceStore, qty: f64, at: u64) -> SimResult<ResourceId> {
        let held = self.quantity(res);
        if qty > held + PIECE_TOL || qty <= 0.0 {
            return Err(SimError::Archetype(format!(
                "cannot take {qty} from an inventory holding {held}"
            )));
        }
        let mut need = qty;
        let mut out: Option<ResourceId> = None;
        while need > PIECE_TOL {
            let Some(front) = self.items.pop_front() else { break };
            let q = res.get(front)?.quantity;
            let piece = if q <= need + PIECE_TOL {
                need -= q;
                front
            } else {
                let (piece, rest) = res.split(front, need, at)?;
                self.items.push_front(rest);
                need = 0.0;
                piece
            };
            out = Some(match out {
                None => piece,
                Some(acc) => res.absorb(acc, piece, at)?,
            });
        }
        out.ok_or_else(|| SimError::Archetype(format!("nothing to take for {qty}")))
    }

    /// Everything held, merged into one resource.
    pub fn take_all(&mut self, res: &mut ResourceStore, at: u64) -> SimResult<Option<ResourceId>> {
        let mut out: Option<ResourceId> = None;
        while let Some(id) = self.items.pop_front() {
            out = Some(match out {
                None => id,
                Some(acc) => res.absorb(acc, id, at)?,
            });
        }
        Ok(out)
    }
}
