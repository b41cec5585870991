//! Bundled example workspaces.

use crate::dsl;
use crate::workspace::Workspace;

pub const ELECTRO_TECH: &str = include_str!("../fixtures/electro_tech.roc");
pub const GENEVA: &str = include_str!("../fixtures/geneva.roc");
pub const CASES: &str = include_str!("../fixtures/cases.roc");

fn load(name: &str, text: &str) -> Workspace {
    match dsl::parse(text) {
        Ok(ws) => ws,
        Err(diags) => {
            let msgs: Vec<_> = diags.iter().map(|d| d.render(name)).collect();
            panic!("bundled fixture is invalid:\n{}", msgs.join("\n"))
        }
    }
}

/// Production planning nets, goal graph, SAP PP catalog and state aliases.
pub fn electro_tech() -> Workspace {
    load("electro_tech.roc", ELECTRO_TECH)
}

/// Order management and SOP nets, goal graph and both component catalogs.
pub fn geneva() -> Workspace {
    load("geneva.roc", GENEVA)
}

/// A three-case repository built from the other two fixtures.
pub fn cases() -> Workspace {
    load("cases.roc", CASES)
}
