mod common;

use std::sync::Arc;

use fck_core::archetypes::standard_registry;
use fck_core::output::{OutputTables, TableKind};
use fck_core::scenario::{analysis, ScenarioDoc, ScenarioError};
use fck_core::NuclideTable;

fn errors(xml: &str) -> Vec<String> {
    let doc = match ScenarioDoc::parse(xml) {
        Ok(d) => d,
        Err(e) => return e.0.iter().map(|c| format!("{}: {}", c.path, c.message)).collect(),
    };
    doc.validate(&standard_registry())
        .into_iter()
        .map(|c| format!("{}: {}", c.path, c.message))
        .collect()
}

fn onepass_text() -> String {
    std::fs::read_to_string(common::scenario_path("onepass")).unwrap()
}

#[test]
fn bundled_scenarios_round_trip() {
    for name in common::BUNDLED.iter().chain(&["smoke"]) {
        let doc = common::load(name);
        assert!(doc.validate(&standard_registry()).is_empty(), "{name}");
        let text = doc.to_xml();
        let again = ScenarioDoc::parse(&text).unwrap();
        assert_eq!(again, doc, "{name}");
        assert!(again.diff(&doc).is_empty());
        assert_eq!(again.to_xml(), text, "{name}: serialization is stable");
    }
}

#[test]
fn diff_names_the_changed_field() {
    let one = common::load("onepass");
    let inf = common::load("infpass");
    let d = one.diff(&inf);
    assert_eq!(d.len(), 1, "{d:?}");
    assert!(d[0].contains("facility[lwr]") && d[0].contains("outcommodity"), "{}", d[0]);
    assert!(d[0].contains("waste") && d[0].contains("spent_fuel"), "{}", d[0]);

    let mut shorter = one.clone();
    shorter.control.duration = 12;
    assert_eq!(one.diff(&shorter).len(), 1);
}

#[test]
fn validation_reports_every_problem_with_its_path() {
    let text = onepass_text()
        .replace("<inrecipe>uox_fresh</inrecipe>", "<inrecipe>uox_fresh2</inrecipe>")
        .replace("<NullRegion/>", "<Source/>")
        .replace("<prototype>repository</prototype>", "<prototype>repo</prototype>")
        .replace("<cycle_time>18</cycle_time>", "<cycle_time>x</cycle_time>");
    let errs = errors(&text);
    let expect = [
        "simulation/facility[lwr]/config/Reactor/fuel[1]/inrecipe: undefined recipe 'uox_fresh2'",
        "simulation/facility[lwr]/config/Reactor/cycle_time: expected a non-negative integer",
        "simulation/region[world]/config/Source: archetype 'Source' is a Facility",
        "simulation/region[world]/institution[utility]/initialfacilitylist/entry[2]/prototype: undefined facility prototype 'repo'",
    ];
    assert_eq!(errs.len(), expect.len(), "{errs:#?}");
    for (got, want) in errs.iter().zip(expect) {
        assert!(got.starts_with(want), "{got}\n  does not start with\n{want}");
    }
}

#[test]
fn structural_errors() {
    assert!(!errors("<simulation><control>").is_empty());
    assert!(!errors("<other/>").is_empty());
    let no_duration = "<simulation><control/></simulation>";
    assert!(errors(no_duration).iter().any(|e| e.contains("duration")), "{:?}", errors(no_duration));

    let dup = onepass_text().replace("<name>uox_fab</name>", "<name>lwr</name>");
    assert!(errors(&dup).iter().any(|e| e.contains("lwr") && e.contains("duplicate")), "{:?}", errors(&dup));

    let unknown = onepass_text().replace("<Sink>", "<Silo>").replace("</Sink>", "</Silo>");
    assert!(errors(&unknown).iter().any(|e| e.contains("Silo")), "{:?}", errors(&unknown));

    let bad_sum = onepass_text().replace("<comp>0.955</comp>", "<comp>0.5</comp>");
    assert!(errors(&bad_sum).iter().any(|e| e.contains("recipe[uox_fresh]")), "{:?}", errors(&bad_sum));

    let bad_solver = onepass_text().replace("<solver>greedy</solver>", "<solver>magic</solver>");
    assert!(errors(&bad_solver).iter().any(|e| e.contains("solver")), "{:?}", errors(&bad_solver));
}

#[test]
fn invalid_documents_fail_before_running() {
    let text = onepass_text().replace("<recipe>depleted_u</recipe>", "<recipe>nope</recipe>");
    let doc = ScenarioDoc::parse(&text).unwrap();
    let err = doc.run(standard_registry(), None).unwrap_err();
    assert!(matches!(err, ScenarioError::Invalid(_)));
    assert!(err.is_user_error());
    assert!(err.to_string().contains("nope"));
}

#[test]
fn atom_basis_recipes_are_converted_to_mass() {
    let xml = r#"<simulation><control><duration>1</duration></control>
        <recipe><name>r</name><basis>atom</basis>
          <nuclide><id>U235</id><comp>0.5</comp></nuclide>
          <nuclide><id>922380</id><comp>0.5</comp></nuclide></recipe>
        <region><name>w</name><config><NullRegion/></config></region></simulation>"#;
    let doc = ScenarioDoc::parse(xml).unwrap();
    let table = Arc::new(NuclideTable::bundled());
    let e = doc.build_engine(standard_registry(), table.clone(), None).unwrap();
    let comp = e.world().recipe("r").unwrap();
    let c = e.world().res.comps().get(comp);
    let (u5, u8): (fck_core::NuclideId, fck_core::NuclideId) = ("U235".parse().unwrap(), "U238".parse().unwrap());
    let (m5, m8) = (table.atomic_mass(u5), table.atomic_mass(u8));
    assert!((c.mass_frac(u5) - m5 / (m5 + m8)).abs() < 1e-12);
}

#[test]
fn metrics_match_in_simulation_counters() {
    for name in ["oncethrough", "onepass", "infpass", "smoke"] {
        let (tables, summary) = common::run(name);
        let pu = analysis::pu_inventory(&tables);
        assert_eq!(pu.len(), summary.pu_series.len());
        for ((t, a), b) in pu.iter().zip(&summary.pu_series) {
            assert!((a - b).abs() <= 1e-9 * b.abs().max(1e-12), "{name} month {t}: {a} vs {b}");
        }
        let traded = analysis::traded_mass(&tables);
        assert_eq!(traded.keys().collect::<Vec<_>>(), summary.traded_mass.keys().collect::<Vec<_>>());
        for (c, q) in &traded {
            let want = summary.traded_mass[c];
            assert!((q - want).abs() <= 1e-9 * want, "{name} {c}: {q} vs {want}");
        }
        assert_eq!(analysis::trades(&tables).len(), summary.trades);
    }
}

#[test]
fn audit_accepts_real_runs_and_catches_dangling_keys() {
    for name in common::BUNDLED.iter().chain(&["smoke"]) {
        let (tables, _) = common::run(name);
        assert_eq!(analysis::audit(&tables), Vec::<String>::new(), "{name}");
    }
    let (mut tables, _) = common::run("smoke");
    let mut row = tables.table(TableKind::Transactions).rows[0].clone();
    let supplier = tables.table(TableKind::Transactions).column("supplier").unwrap();
    row[supplier] = "999".into();
    tables.push(TableKind::Transactions, row);
    tables.push(TableKind::Resources, {
        let t = tables.table(TableKind::Resources);
        let mut r = t.rows[0].clone();
        r[t.column("comp_id").unwrap()] = "123456".into();
        r
    });
    let problems = analysis::audit(&tables);
    assert!(problems.iter().any(|p| p.contains("unknown agent 999")), "{problems:?}");
    assert!(problems.iter().any(|p| p.contains("composition 123456")), "{problems:?}");
}

#[test]
fn tables_written_to_disk_read_back_identically() {
    let dir = tempfile::tempdir().unwrap();
    let (tables, _) = common::load("smoke").run(standard_registry(), Some(dir.path().into())).unwrap();
    let back = OutputTables::load_dir(dir.path()).unwrap();
    for kind in TableKind::ALL {
        assert_eq!(back.table(kind).rows, tables.table(kind).rows, "{}", kind.name());
        let text = std::fs::read_to_string(dir.path().join(kind.file_name())).unwrap();
        assert!(text.starts_with(&TableKind::header(kind).join(",")));
        assert!(!text.contains('\r'));
        assert!(text.ends_with('\n'));
    }
}

#[test]
fn provenance_follows_material_through_processing() {
    let (tables, _) = common::run("smoke");
    let p = analysis::provenance(&tables, "FuelFab", "Separations");
    assert!(p.inputs > 0 && p.descended > 0, "{p:?}");
    let q = analysis::provenance(&tables, "Separations", "Reactor");
    assert!(q.descended > 0, "recycled fuel reaches the reactors: {q:?}");
    let none = analysis::provenance(&tables, "Sink", "Reactor");
    assert_eq!(none.descended, 0);
}
