//! Separative work and feed requirements for uranium enrichment.

use super::ToolkitError;

/// U-235 weight fractions of the three streams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assays {
    pub feed: f64,
    pub product: f64,
    pub tails: f64,
}

impl Assays {
    pub fn new(feed: f64, product: f64, tails: f64) -> Result<Self, ToolkitError> {
        let a = Assays { feed, product, tails };
        a.validate()?;
        Ok(a)
    }

    /// Requires `0 < tails < feed ≤ product < 1`.
    pub fn validate(&self) -> Result<(), ToolkitError> {
        let ok = self.tails > 0.0
            && self.tails < self.feed
            && self.feed <= self.product
            && self.product < 1.0;
        if ok {
            Ok(())
        } else {
            Err(ToolkitError::AssayOrder {
                feed: self.feed,
                product: self.product,
                tails: self.tails,
            })
        }
    }
}

/// Separation potential `V(x) = (2x - 1) ln(x / (1 - x))`.
pub fn value_fn(x: f64) -> f64 {
    (2.0 * x - 1.0) * (x / (1.0 - x)).ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnrichmentNeeds {
    /// kg-SWU
    pub swu: f64,
    /// kg of feed
    pub feed: f64,
    /// kg of tails
    pub tails: f64,
}

/// SWU and natural feed needed to produce `product_qty` kg at `assays`.
pub fn swu_required(assays: &Assays, product_qty: f64) -> Result<EnrichmentNeeds, ToolkitError> {
    assays.validate()?;
    if !(product_qty >= 0.0) || !product_qty.is_finite() {
        return Err(ToolkitError::BadQuantity(product_qty));
    }
    let Assays { feed: xf, product: xp, tails: xt } = *assays;
    let feed = product_qty * (xp - xt) / (xf - xt);
    let tails = feed - product_qty;
    let swu = product_qty * value_fn(xp) + tails * value_fn(xt) - feed * value_fn(xf);
    Ok(EnrichmentNeeds { swu: swu.max(0.0), feed, tails })
}
