use super::composition::Composition;
use super::nuclide::{NuclideId, NuclideTable};

/// Read-only inspection of a material's nuclide content.
///
/// Unknown nuclides report zero rather than failing.
pub struct MatQuery<'a> {
    quantity: f64,
    comp: &'a Composition,
    table: &'a NuclideTable,
}

impl<'a> MatQuery<'a> {
    pub fn new(quantity: f64, comp: &'a Composition, table: &'a NuclideTable) -> Self {
        MatQuery { quantity, comp, table }
    }

    pub fn quantity(&self) -> f64 {
        self.quantity
    }

    pub fn mass_frac(&self, nuc: NuclideId) -> f64 {
        self.comp.mass_frac(nuc)
    }

    /// kg of `nuc`.
    pub fn mass(&self, nuc: NuclideId) -> f64 {
        self.quantity * self.comp.mass_frac(nuc)
    }

    /// kg of all isotopes of element `z`.
    pub fn element_mass(&self, z: u32) -> f64 {
        self.quantity * self.comp.element_frac(z)
    }

    /// Moles of `nuc` (quantity is kg, atomic masses g/mol).
    pub fn moles(&self, nuc: NuclideId) -> f64 {
        self.mass(nuc) * 1000.0 / self.table.atomic_mass(nuc)
    }

    fn atoms_per_kg_sum(&self) -> f64 {
        self.comp
            .fractions()
            .iter()
            .map(|&(n, f)| f / self.table.atomic_mass(n))
            .sum()
    }

    pub fn atom_frac(&self, nuc: NuclideId) -> f64 {
        let f = self.comp.mass_frac(nuc);
        if f == 0.0 {
            return 0.0;
        }
        (f / self.table.atomic_mass(nuc)) / self.atoms_per_kg_sum()
    }

    /// All atom fractions, in nuclide order.
    pub fn atom_fractions(&self) -> Vec<(NuclideId, f64)> {
        let total = self.atoms_per_kg_sum();
        self.comp
            .fractions()
            .iter()
            .map(|&(n, f)| (n, f / self.table.atomic_mass(n) / total))
            .collect()
    }

    pub fn mass_fractions(&self) -> &[(NuclideId, f64)] {
        self.comp.fractions()
    }
}
