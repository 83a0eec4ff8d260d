//! Verification suites over an atlas, shared by the command line and tests.

use crate::atlas::{validate_atlas, StrataAtlas};
use crate::complexes::{
    build, coker_u, coker_v, inclusion_morphism, restriction_morphism, rows_constant, rows_log, rows_stratum_log,
    rows_sum_strata, rows_semisimplicial_log, ComplexError, ComplexSelector, RowFamily,
};
use crate::logforms::logforms_report;
use crate::mhs::{compare_tables, compute_table, euler_check, MixedHodgeTable};
use crate::pairings::{chain_map_check, cup_extraordinary, cup_log_xd, fujiki_duality_report, les_check, PairingError};
use crate::report::Report;

pub const SUITES: [&str; 6] = ["consistency", "fujiki", "les", "cup", "logforms", "all"];

/// `d² = 0` on every weight row, checked from the stored blocks.
pub fn square_zero(rows: &RowFamily) -> bool {
    rows.weights().into_iter().all(|w| {
        rows.degrees().into_iter().all(|m| {
            let (d0, d1) = (rows.differential(w, m), rows.differential(w, m + 1));
            if d0.rows() == 0 || d0.cols() == 0 || d1.rows() == 0 {
                return true;
            }
            d1.mul(&d0).map(|p| p.is_zero()).unwrap_or(false)
        })
    })
}

/// Every differential block respects weight, degree and Hodge type.
pub fn blocks_additive(rows: &RowFamily) -> bool {
    RowFamily::new(rows.name(), rows.terms().to_vec(), rows.blocks().clone()).is_ok()
}

fn family_checks(report: &mut Report, rows: &RowFamily) -> Result<MixedHodgeTable, PairingError> {
    let loc = rows.name().to_string();
    report.assert("d² = 0 on every weight row", &loc, square_zero(rows));
    report.assert("differential blocks weight- and type-additive", &loc, blocks_additive(rows));
    let table = compute_table(rows)?;
    report.assert("euler characteristic per weight", &loc, euler_check(&table, rows));
    Ok(table)
}

fn compare(report: &mut Report, what: &str, a: &MixedHodgeTable, b: &MixedHodgeTable) {
    let cmp = compare_tables(a, b);
    let actual = match &cmp.first_difference {
        None => "equal".to_string(),
        Some(d) => format!(
            "differ at degree {} weight {} type {}: {} vs {}",
            d.degree, d.weight, d.hodge, d.left, d.right
        ),
    };
    report.push(what, format!("{} vs {}", a.complex, b.complex), "equal", actual);
}

/// Atlas axioms, structural checks on every standard complex and on the
/// neighbourhood complex of each stratum of `D`, the two model
/// comparisons and injectivity of `u` and `v`.
pub fn consistency_report(atlas: &StrataAtlas) -> Result<Report, PairingError> {
    let mut report = Report::new("consistency");
    let validation = validate_atlas(atlas);
    let first = validation
        .violations
        .first()
        .map_or_else(|| "0 violations".to_string(), |v| format!("{}: {} ({})", v.check, v.location, v.witness));
    report.push("atlas axioms", "atlas", "0 violations", first);
    let mut tables = std::collections::BTreeMap::new();
    for sel in ComplexSelector::standard() {
        let rows = build(atlas, &sel)?;
        tables.insert(sel.to_string(), family_checks(&mut report, &rows)?);
    }
    for id in atlas.stratum_ids().filter(|&s| !atlas.indices(s).is_empty()) {
        let rows = rows_stratum_log(atlas, id)?;
        family_checks(&mut report, &rows)?;
    }
    compare(&mut report, "pair cohomology models agree", &tables["xd"], &tables["xd-tilde"]);
    compare(&mut report, "local cohomology models agree", &tables["locd"], &tables["locd-tilde"]);
    let (x, l) = (rows_constant(atlas)?, rows_log(atlas)?);
    report.assert(
        "u: K(X) -> K(X log D) blockwise injective",
        "u",
        inclusion_morphism(&x, &l).is_blockwise_injective(&x, &l),
    );
    if atlas.has_divisor() {
        let (d, dl) = (rows_sum_strata(atlas)?, rows_semisimplicial_log(atlas)?);
        report.assert(
            "v: K(D) -> K(D log D) blockwise injective",
            "v",
            inclusion_morphism(&d, &dl).is_blockwise_injective(&d, &dl),
        );
        for (name, src, tgt, f) in [
            ("restriction K(X) -> K(D)", &x, &d, restriction_morphism(atlas, &x, &d)),
            ("restriction K(X log D) -> K(D log D)", &l, &dl, restriction_morphism(atlas, &l, &dl)),
            ("u", &x, &l, inclusion_morphism(&x, &l)),
            ("v", &d, &dl, inclusion_morphism(&d, &dl)),
        ] {
            report.assert("chain map", name, f.check(src, tgt).is_ok());
        }
        for rows in [coker_u(atlas)?, coker_v(atlas)?] {
            family_checks(&mut report, &rows)?;
        }
    }
    Ok(report)
}

/// Additivity and the Leibniz rule for both cup products.
pub fn cup_report(atlas: &StrataAtlas) -> Result<Report, PairingError> {
    let mut report = Report::new("cup");
    if !atlas.has_divisor() {
        report.assert("cup products need a divisor", "atlas", true);
        return Ok(report);
    }
    for pairing in [cup_log_xd(atlas)?, cup_extraordinary(atlas)?] {
        let loc = pairing.name.clone();
        let first = pairing.first_non_additive_block();
        report.push(
            "product blocks weight- and type-additive",
            &loc,
            "all additive",
            first.map_or_else(|| "all additive".to_string(), |b| format!("block {b}")),
        );
        report.assert("product is a chain map (Leibniz)", &loc, chain_map_check(&pairing));
    }
    Ok(report)
}

pub fn fujiki_report(atlas: &StrataAtlas) -> Result<Report, PairingError> {
    fujiki_duality_report(atlas)
}

pub fn les_report(atlas: &StrataAtlas) -> Result<Report, PairingError> {
    les_check(atlas)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogformsOptions {
    pub seed: u64,
    pub trials: usize,
    pub max_n: usize,
    pub degree_bound: u32,
}

impl Default for LogformsOptions {
    fn default() -> Self {
        LogformsOptions {
            seed: 0,
            trials: crate::logforms::DEFAULT_TRIALS,
            max_n: 4,
            degree_bound: crate::logforms::DEFAULT_DEGREE_BOUND,
        }
    }
}

/// Runs a named suite. Atlas suites need an atlas; `all` skips them without one.
pub fn run_suite(name: &str, atlas: Option<&StrataAtlas>, logforms: &LogformsOptions) -> Result<Report, SuiteError> {
    let need = || atlas.ok_or_else(|| SuiteError::NeedsAtlas(name.to_string()));
    let report = match name {
        "consistency" => consistency_report(need()?)?,
        "fujiki" => fujiki_report(need()?)?,
        "les" => les_report(need()?)?,
        "cup" => cup_report(need()?)?,
        "logforms" => {
            let mut r = logforms_report(logforms.seed, logforms.trials, logforms.max_n, logforms.degree_bound);
            r.seed = Some(logforms.seed);
            r
        }
        "all" => {
            let mut all = Report::new("all");
            all.seed = Some(logforms.seed);
            if let Some(a) = atlas {
                for s in ["consistency", "fujiki", "les", "cup"] {
                    let mut r = run_suite(s, Some(a), logforms)?;
                    for c in &mut r.checks {
                        c.check = format!("[{s}] {}", c.check);
                    }
                    all.extend(r);
                }
            }
            let mut r = run_suite("logforms", None, logforms)?;
            for c in &mut r.checks {
                c.check = format!("[logforms] {}", c.check);
            }
            all.extend(r);
            all
        }
        other => return Err(SuiteError::Unknown(other.to_string())),
    };
    Ok(report)
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum SuiteError {
    #[error("unknown suite `{0}`; expected one of consistency, fujiki, les, cup, logforms, all")]
    Unknown(String),
    #[error("suite `{0}` needs an atlas (--config or --family)")]
    NeedsAtlas(String),
    #[error(transparent)]
    Pairing(#[from] PairingError),
}

impl From<ComplexError> for SuiteError {
    fn from(e: ComplexError) -> Self {
        SuiteError::Pairing(e.into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::generic_arrangement;

    #[test]
    fn consistency_on_the_triangle() {
        let atlas = generic_arrangement(2, 3).unwrap();
        let r = consistency_report(&atlas).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn cup_on_two_points() {
        let atlas = generic_arrangement(1, 2).unwrap();
        let r = cup_report(&atlas).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        assert_eq!(r.checks.len(), 4);
    }

    #[test]
    fn unknown_suite() {
        let opts = LogformsOptions::default();
        assert!(matches!(run_suite("nope", None, &opts), Err(SuiteError::Unknown(_))));
        assert!(matches!(run_suite("fujiki", None, &opts), Err(SuiteError::NeedsAtlas(_))));
    }

    #[test]
    fn square_zero_holds_on_log_rows() {
        let atlas = generic_arrangement(1, 2).unwrap();
        let rows = build(&atlas, &ComplexSelector::Log).unwrap();
        assert!(square_zero(&rows));
    }
}
