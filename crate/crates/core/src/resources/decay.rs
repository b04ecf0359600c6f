//! Analytic linear-chain decay on mass fractions.
//!
//! Every parent nuclide is expanded into the set of linear decay paths it
//! can follow through the table; each path contributes the Bateman solution
//! for its last member, weighted by the product of branch fractions along
//! the way. Branches are treated as mass preserving.

use std::collections::BTreeMap;

use super::nuclide::{NuclideId, NuclideTable};

/// `λ·Δt` below this for every nuclide present makes a decay call a no-op.
pub const SIGNIFICANCE_EPS: f64 = 1e-6;

/// How materials are decayed during a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecayMode {
    /// Only when an archetype asks for it.
    #[default]
    Manual,
    /// Decay calls do nothing.
    Never,
    /// Decay to the current time whenever a composition is observed.
    Lazy,
}

impl DecayMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DecayMode::Manual => "manual",
            DecayMode::Never => "never",
            DecayMode::Lazy => "lazy",
        }
    }
}

impl std::str::FromStr for DecayMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "manual" => Ok(DecayMode::Manual),
            "never" => Ok(DecayMode::Never),
            "lazy" => Ok(DecayMode::Lazy),
            other => Err(format!("unknown decay mode '{other}'")),
        }
    }
}

/// True when at least one nuclide present decays noticeably over `dt` months.
pub fn is_significant<'a>(
    table: &NuclideTable,
    nuclides: impl IntoIterator<Item = &'a NuclideId>,
    dt: f64,
) -> bool {
    nuclides
        .into_iter()
        .any(|&n| table.decay_const(n) * dt >= SIGNIFICANCE_EPS)
}

/// Relative spacing under which two decay constants on one path are nudged
/// apart to keep the Bateman denominators finite.
const DEGENERATE_REL: f64 = 1e-9;

/// Decay a mass-fraction vector by `dt` months. The output is not renormalized
/// and may contain nuclides absent from the input.
pub fn decay_fractions(
    table: &NuclideTable,
    fractions: &[(NuclideId, f64)],
    dt: f64,
) -> BTreeMap<NuclideId, f64> {
    let mut out: BTreeMap<NuclideId, f64> = BTreeMap::new();
    if dt == 0.0 {
        out.extend(fractions.iter().copied());
        return out;
    }
    let mut path: Vec<f64> = Vec::with_capacity(16);
    for &(parent, x0) in fractions {
        if x0 == 0.0 {
            continue;
        }
        walk(table, parent, x0, dt, &mut path, &mut out);
    }
    out.retain(|_, v| *v > 0.0);
    out
}

fn walk(
    table: &NuclideTable,
    nuc: NuclideId,
    weight: f64,
    dt: f64,
    path: &mut Vec<f64>,
    out: &mut BTreeMap<NuclideId, f64>,
) {
    let mut lambda = table.decay_const(nuc);
    // keep constants on one path pairwise distinct
    for &l in path.iter() {
        let scale = l.abs().max(lambda.abs());
        if scale > 0.0 && (l - lambda).abs() <= DEGENERATE_REL * scale {
            lambda = l * (1.0 + 2.0 * DEGENERATE_REL);
        }
    }
    path.push(lambda);
    *out.entry(nuc).or_insert(0.0) += weight * bateman_last(path, dt);
    if lambda > 0.0 {
        for &(daughter, branch) in table.branches(nuc) {
            if branch > 0.0 {
                walk(table, daughter, weight * branch, dt, path, out);
            }
        }
    }
    path.pop();
}

/// Amount of the last member of a linear chain after `t`, starting from a
/// unit amount of the first member and nothing else.
pub fn bateman_last(lambdas: &[f64], t: f64) -> f64 {
    let k = lambdas.len();
    if k == 1 {
        return (-lambdas[0] * t).exp();
    }
    let prefactor: f64 = lambdas[..k - 1].iter().product();
    let mut sum = 0.0;
    for i in 0..k {
        let mut denom = 1.0;
        for j in 0..k {
            if j != i {
                denom *= lambdas[j] - lambdas[i];
            }
        }
        sum += (-lambdas[i] * t).exp() / denom;
    }
    (prefactor * sum).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nuc(s: &str) -> NuclideId {
        s.parse().unwrap()
    }

    #[test]
    fn zero_dt_is_identity() {
        let t = NuclideTable::bundled();
        let x = [(nuc("Pu241"), 0.3), (nuc("U238"), 0.7)];
        let y = decay_fractions(&t, &x, 0.0);
        assert_eq!(y[&nuc("Pu241")], 0.3);
        assert_eq!(y[&nuc("U238")], 0.7);
    }

    #[test]
    fn pu241_half_life() {
        let t = NuclideTable::bundled();
        let y = decay_fractions(&t, &[(nuc("Pu241"), 1.0)], 171.5);
        assert!((y[&nuc("Pu241")] - 0.5).abs() < 1e-12);
        assert!(y[&nuc("Am241")] > 0.49);
        let total: f64 = y.values().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_member_chain_matches_closed_form() {
        // parent -> daughter with a stable grand-daughter
        let l1: f64 = 0.1;
        let l2: f64 = 0.03;
        let t = 7.0;
        let expected = l1 / (l2 - l1) * ((-l1 * t).exp() - (-l2 * t).exp());
        assert!((bateman_last(&[l1, l2], t) - expected).abs() < 1e-15);
        let stable = 1.0 - (-l1 * t).exp();
        assert!((bateman_last(&[l1, 0.0], t) - stable).abs() < 1e-15);
    }

    #[test]
    fn sub_threshold_check() {
        let t = NuclideTable::bundled();
        assert!(!is_significant(&t, &[nuc("U238")], 1100.0));
        assert!(is_significant(&t, &[nuc("U238"), nuc("Pu241")], 1.0));
        assert!(!is_significant(&t, &[nuc("Pb206")], 1e9));
    }
}
