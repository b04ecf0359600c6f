//! Nuclide identifiers and the decay data table.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::ResourceError;

/// Environment variable that overrides the bundled decay table.
pub const NUCLIDE_DATA_ENV: &str = "FCK_NUCLIDE_DATA";

const BUNDLED_TABLE: &str = include_str!("../../data/nuclides.txt");

const ELEMENTS: [&str; 118] = [
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl",
    "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As",
    "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In",
    "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb",
    "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl",
    "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U", "Np", "Pu", "Am", "Cm", "Bk",
    "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh",
    "Fl", "Mc", "Lv", "Ts", "Og",
];

/// Atomic number of an element symbol, case-insensitive.
pub fn element_number(symbol: &str) -> Option<u32> {
    ELEMENTS
        .iter()
        .position(|e| e.eq_ignore_ascii_case(symbol.trim()))
        .map(|i| i as u32 + 1)
}

/// Nuclide in ZZAAAM form: `Z * 10000 + A * 10 + metastable state`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NuclideId(u32);

impl NuclideId {
    pub fn new(z: u32, a: u32, meta: u32) -> Result<Self, ResourceError> {
        if !(1..=120).contains(&z) || a < z || a > 999 || meta > 9 {
            return Err(ResourceError::InvalidNuclide(format!("Z={z} A={a} m={meta}")));
        }
        Ok(NuclideId(z * 10000 + a * 10 + meta))
    }

    pub fn from_zzaaam(id: u32) -> Result<Self, ResourceError> {
        Self::new(id / 10000, (id / 10) % 1000, id % 10)
    }

    pub fn zzaaam(self) -> u32 {
        self.0
    }

    pub fn z(self) -> u32 {
        self.0 / 10000
    }

    pub fn a(self) -> u32 {
        (self.0 / 10) % 1000
    }

    pub fn meta(self) -> u32 {
        self.0 % 10
    }

    /// Element symbol, or `"X"` past the end of the periodic table.
    pub fn symbol(self) -> &'static str {
        ELEMENTS.get(self.z() as usize - 1).copied().unwrap_or("X")
    }

    /// Human readable alias such as `Pu239` or `Am242m`.
    pub fn alias(self) -> String {
        let m = if self.meta() > 0 { "m" } else { "" };
        format!("{}{}{}", self.symbol(), self.a(), m)
    }
}

impl fmt::Display for NuclideId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.alias())
    }
}

impl FromStr for NuclideId {
    type Err = ResourceError;

    /// Accepts ZZAAAM integers (`942390`) and names (`Pu239`, `Pu-239`, `am242m`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ResourceError::InvalidNuclide(s.to_string());
        if let Ok(n) = s.parse::<u32>() {
            return Self::from_zzaaam(n).map_err(|_| bad());
        }
        let letters: String = s.chars().take_while(|c| c.is_ascii_alphabetic()).collect();
        let rest = s[letters.len()..].trim_start_matches('-');
        let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
        let suffix = &rest[digits.len()..];
        let meta = match suffix {
            "" => 0,
            "m" | "M" => 1,
            _ => return Err(bad()),
        };
        let z = element_number(&letters).ok_or_else(bad)?;
        let a: u32 = digits.parse().map_err(|_| bad())?;
        Self::new(z, a, meta).map_err(|_| bad())
    }
}

/// Decay properties of one nuclide.
#[derive(Debug, Clone, PartialEq)]
pub struct NuclideData {
    /// Decay constant in 1/month; zero for stable nuclides.
    pub decay_const: f64,
    pub branches: Vec<(NuclideId, f64)>,
    /// g/mol
    pub atomic_mass: f64,
}

impl NuclideData {
    pub fn is_stable(&self) -> bool {
        self.decay_const == 0.0
    }
}

/// Decay data keyed by nuclide. Nuclides absent from the table are treated as
/// stable with an atomic mass equal to their mass number.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NuclideTable {
    data: BTreeMap<NuclideId, NuclideData>,
}

impl NuclideTable {
    /// The table shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_TABLE).expect("bundled nuclide table is valid")
    }

    /// The table named by `FCK_NUCLIDE_DATA`, falling back to the bundled one.
    pub fn from_env() -> Result<Self, ResourceError> {
        match std::env::var_os(NUCLIDE_DATA_ENV) {
            Some(path) => Self::load(Path::new(&path)),
            None => Ok(Self::bundled()),
        }
    }

    pub fn load(path: &Path) -> Result<Self, ResourceError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ResourceError::NuclideData(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ResourceError> {
        let mut data: BTreeMap<NuclideId, NuclideData> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| ResourceError::NuclideData(format!("line {}: {msg}", lineno + 1));
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 5 {
                return Err(err("expected 5 columns"));
            }
            let nuc: NuclideId = cols[0].parse().map_err(|_| err("bad nuclide"))?;
            let mass: f64 = cols[4].parse().map_err(|_| err("bad atomic mass"))?;
            if !(mass > 0.0) {
                return Err(err("atomic mass must be positive"));
            }
            let decay_const = if cols[1].eq_ignore_ascii_case("stable") {
                0.0
            } else {
                let half: f64 = cols[1].parse().map_err(|_| err("bad half-life"))?;
                if !(half > 0.0) || !half.is_finite() {
                    return Err(err("half-life must be positive"));
                }
                std::f64::consts::LN_2 / half
            };
            let entry = data.entry(nuc).or_insert_with(|| NuclideData {
                decay_const,
                branches: Vec::new(),
                atomic_mass: mass,
            });
            if entry.decay_const != decay_const || entry.atomic_mass != mass {
                return Err(err("inconsistent rows for nuclide"));
            }
            if decay_const > 0.0 {
                let daughter: NuclideId = cols[2].parse().map_err(|_| err("bad daughter"))?;
                let branch: f64 = cols[3].parse().map_err(|_| err("bad branch"))?;
                if !(0.0..=1.0).contains(&branch) {
                    return Err(err("branch fraction outside [0, 1]"));
                }
                entry.branches.push((daughter, branch));
            }
        }
        for (nuc, d) in &data {
            if d.decay_const > 0.0 {
                let total: f64 = d.branches.iter().map(|b| b.1).sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(ResourceError::NuclideData(format!(
                        "{nuc}: branch fractions sum to {total}"
                    )));
                }
            }
        }
        let table = NuclideTable { data };
        table.check_acyclic()?;
        Ok(table)
    }

    fn check_acyclic(&self) -> Result<(), ResourceError> {
        // 0 = unvisited, 1 = on stack, 2 = done
        fn visit(
            t: &NuclideTable,
            n: NuclideId,
            state: &mut BTreeMap<NuclideId, u8>,
        ) -> Result<(), ResourceError> {
            match state.get(&n) {
                Some(2) => return Ok(()),
                Some(1) => return Err(ResourceError::NuclideData(format!("decay cycle through {n}"))),
                _ => {}
            }
            state.insert(n, 1);
            for &(d, _) in t.branches(n) {
                visit(t, d, state)?;
            }
            state.insert(n, 2);
            Ok(())
        }
        let mut state = BTreeMap::new();
        for &n in self.data.keys() {
            visit(self, n, &mut state)?;
        }
        Ok(())
    }

    pub fn get(&self, nuc: NuclideId) -> Option<&NuclideData> {
        self.data.get(&nuc)
    }

    pub fn decay_const(&self, nuc: NuclideId) -> f64 {
        self.data.get(&nuc).map_or(0.0, |d| d.decay_const)
    }

    pub fn branches(&self, nuc: NuclideId) -> &[(NuclideId, f64)] {
        self.data.get(&nuc).map_or(&[], |d| d.branches.as_slice())
    }

    pub fn atomic_mass(&self, nuc: NuclideId) -> f64 {
        self.data.get(&nuc).map_or(nuc.a() as f64, |d| d.atomic_mass)
    }

    pub fn nuclides(&self) -> impl Iterator<Item = NuclideId> + '_ {
        self.data.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_names_and_ids() {
        let pu: NuclideId = "Pu239".parse().unwrap();
        assert_eq!(pu.zzaaam(), 942390);
        assert_eq!("Pu-239".parse::<NuclideId>().unwrap(), pu);
        assert_eq!("942390".parse::<NuclideId>().unwrap(), pu);
        assert_eq!("am242m".parse::<NuclideId>().unwrap().zzaaam(), 952421);
        assert_eq!(pu.alias(), "Pu239");
        assert!("Xx12".parse::<NuclideId>().is_err());
        assert!("U".parse::<NuclideId>().is_err());
        // A < Z
        assert!(NuclideId::new(92, 50, 0).is_err());
        assert!(NuclideId::new(0, 1, 0).is_err());
    }

    #[test]
    fn bundled_table_is_consistent() {
        let t = NuclideTable::bundled();
        assert!(t.len() >= 25);
        let pu241: NuclideId = "Pu241".parse().unwrap();
        let lambda = t.decay_const(pu241);
        assert!((std::f64::consts::LN_2 / lambda - 171.5).abs() < 1e-9);
        assert_eq!(t.branches(pu241).len(), 2);
        let pb206: NuclideId = "Pb206".parse().unwrap();
        assert!(t.get(pb206).unwrap().is_stable());
        for n in t.nuclides() {
            let d = t.get(n).unwrap();
            assert!(d.decay_const >= 0.0);
            if d.is_stable() {
                assert!(d.branches.is_empty());
            }
        }
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(NuclideTable::parse("922380 10 922340 0.5 238.0").is_err());
        let cyc = "922380 10 922340 1 238\n922340 10 922380 1 234\n";
        assert!(matches!(NuclideTable::parse(cyc), Err(ResourceError::NuclideData(_))));
        assert!(NuclideTable::parse("922380 10 922340").is_err());
    }

    #[test]
    fn unknown_nuclides_default_to_stable() {
        let t = NuclideTable::bundled();
        let n = NuclideId::new(50, 120, 0).unwrap();
        assert_eq!(t.decay_const(n), 0.0);
        assert_eq!(t.atomic_mass(n), 120.0);
    }
}
