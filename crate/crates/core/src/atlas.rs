//! Queryable classification of crown domains: which symmetric spaces have a
//! Hermitian symmetric crown (and what it is) and which have a rigid crown.
//!
//! The rows are kept exactly as printed; lookups are purely syntactic on the
//! row patterns and their integer constraints, with no resolution of
//! low-dimensional isomorphism overlaps. Excluded parameters (for example
//! `SL(2,R)/SO(2)` against the `n > 2` row) report `OutOfRange` rather than
//! rerouting to an isomorphic row.
//!
//! Line format (`AtlasEntry::to_line`):
//! `table<k> <TAB> <pattern> <TAB> <constraints or -> <TAB> <class>`
//! where `<class>` is `hermitian-self`, `hermitian-target <descriptor>` or
//! `rigid`.

use crate::error::{Error, Result};

/// The encoded symmetric-space families, one per printed row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// SU(p,q)/S(U(p)xU(q))
    SuPQ,
    /// SO0(p,2)/(SO(p)xSO(2))
    So0P2,
    /// SO*(2n)/U(n)
    SoStar2n,
    /// Sp(n,R)/U(n)
    SpNR,
    /// (e6(-14), so(10)+R)
    E6M14,
    /// (e7(-25), e6+R)
    E7M25,
    /// SO0(p,1)/SO(p), p > 2
    So0P1,
    /// Sp(p,q)/(Sp(p)xSp(q))
    SpPQ,
    /// (f4(-20), so(9))
    F4M20,
    /// SL(n,R)/SO(n), n > 2
    SlNR,
    /// SO0(p,q)/(SO(p)xSO(q)), p, q > 2
    So0PQ,
    /// SU*(2n)/Sp(n)
    SuStar2n,
    /// SL(n,C)/SU(n), n > 2
    SlNC,
    /// SO(n,C)/SO(n), n > 3
    SoNC,
    /// Sp(n,C)/Sp(n), n > 1
    SpNC,
    /// All the other exceptional cases (marker row).
    OtherExceptional,
}

/// Crown classification of a row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CrownClass {
    /// The space is Hermitian symmetric; the crown is the product with the
    /// conjugate copy.
    HermitianSelf,
    /// The crown is the named Hermitian symmetric space of a larger group.
    HermitianTarget(String),
    /// The automorphisms of the crown are the isometries of the space.
    Rigid,
}

impl std::fmt::Display for CrownClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CrownClass::HermitianSelf => write!(f, "hermitian-self"),
            CrownClass::HermitianTarget(t) => write!(f, "hermitian-target {t}"),
            CrownClass::Rigid => write!(f, "rigid"),
        }
    }
}

/// One table row, possibly instantiated at concrete parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AtlasEntry {
    pub family: Family,
    /// The printed row pattern with symbolic parameters.
    pub pattern: &'static str,
    /// The printed parameter constraint, empty when the row has none.
    pub constraints: &'static str,
    /// 1 for the Hermitian tables, 2 for the rigid table.
    pub table: u8,
    pub crown_class: CrownClass,
}

impl AtlasEntry {
    /// Serializes to the documented tab-separated line format.
    pub fn to_line(&self) -> String {
        let constraints = if self.constraints.is_empty() {
            "-"
        } else {
            self.constraints
        };
        format!(
            "table{}\t{}\t{}\t{}",
            self.table, self.pattern, constraints, self.crown_class
        )
    }
}

struct RowSpec {
    family: Family,
    pattern: &'static str,
    constraints: &'static str,
    table: u8,
    param_count: usize,
    check: fn(&[i64]) -> bool,
    class: fn(&[i64]) -> CrownClass,
}

fn positive(params: &[i64]) -> bool {
    params.iter().all(|&p| p >= 1)
}

const ROWS: &[RowSpec] = &[
    RowSpec {
        family: Family::SuPQ,
        pattern: "SU(p,q)/S(U(p)xU(q))",
        constraints: "",
        table: 1,
        param_count: 2,
        check: positive,
        class: |_| CrownClass::HermitianSelf,
    },
    RowSpec {
        family: Family::So0P2,
        pattern: "SO0(p,2)/(SO(p)xSO(2))",
        constraints: "",
        table: 1,
        param_count: 1,
        check: positive,
        class: |_| CrownClass::HermitianSelf,
    },
    RowSpec {
        family: Family::SoStar2n,
        pattern: "SO*(2n)/U(n)",
        constraints: "",
        table: 1,
        param_count: 1,
        check: positive,
        class: |_| CrownClass::HermitianSelf,
    },
    RowSpec {
        family: Family::SpNR,
        pattern: "Sp(n,R)/U(n)",
        constraints: "",
        table: 1,
        param_count: 1,
        check: positive,
        class: |_| CrownClass::HermitianSelf,
    },
    RowSpec {
        family: Family::E6M14,
        pattern: "(e6(-14),so(10)+R)",
        constraints: "",
        table: 1,
        param_count: 0,
        check: |_| true,
        class: |_| CrownClass::HermitianSelf,
    },
    RowSpec {
        family: Family::E7M25,
        pattern: "(e7(-25),e6+R)",
        constraints: "",
        table: 1,
        param_count: 0,
        check: |_| true,
        class: |_| CrownClass::HermitianSelf,
    },
    RowSpec {
        family: Family::So0P1,
        pattern: "SO0(p,1)/SO(p)",
        constraints: "p>2",
        table: 1,
        param_count: 1,
        check: |p| p[0] > 2,
        class: |p| {
            if p.is_empty() {
                CrownClass::HermitianTarget("SO0(p,2)/(SO(p)xSO(2))".into())
            } else {
                CrownClass::HermitianTarget(format!("SO0({},2)/(SO({})xSO(2))", p[0], p[0]))
            }
        },
    },
    RowSpec {
        family: Family::SpPQ,
        pattern: "Sp(p,q)/(Sp(p)xSp(q))",
        constraints: "",
        table: 1,
        param_count: 2,
        check: positive,
        class: |p| {
            if p.is_empty() {
                CrownClass::HermitianTarget("SU(2p,2q)/S(U(2p)xU(2q))".into())
            } else {
                CrownClass::HermitianTarget(format!(
                    "SU({},{})/S(U({})xU({}))",
                    2 * p[0],
                    2 * p[1],
                    2 * p[0],
                    2 * p[1]
                ))
            }
        },
    },
    RowSpec {
        family: Family::F4M20,
        pattern: "(f4(-20),so(9))",
        constraints: "",
        table: 1,
        param_count: 0,
        check: |_| true,
        class: |_| CrownClass::HermitianTarget("(e6(-14),so(10)+R)".into()),
    },
    RowSpec {
        family: Family::SlNR,
        pattern: "SL(n,R)/SO(n)",
        constraints: "n>2",
        table: 2,
        param_count: 1,
        check: |p| p[0] > 2,
        class: |_| CrownClass::Rigid,
    },
    RowSpec {
        family: Family::So0PQ,
        pattern: "SO0(p,q)/(SO(p)xSO(q))",
        constraints: "p,q>2",
        table: 2,
        param_count: 2,
        check: |p| p[0] > 2 && p[1] > 2,
        class: |_| CrownClass::Rigid,
    },
    RowSpec {
        family: Family::SuStar2n,
        pattern: "SU*(2n)/Sp(n)",
        constraints: "",
        table: 2,
        param_count: 1,
        check: positive,
        class: |_| CrownClass::Rigid,
    },
    RowSpec {
        family: Family::SlNC,
        pattern: "SL(n,C)/SU(n)",
        constraints: "n>2",
        table: 2,
        param_count: 1,
        check: |p| p[0] > 2,
        class: |_| CrownClass::Rigid,
    },
    RowSpec {
        family: Family::SoNC,
        pattern: "SO(n,C)/SO(n)",
        constraints: "n>3",
        table: 2,
        param_count: 1,
        check: |p| p[0] > 3,
        class: |_| CrownClass::Rigid,
    },
    RowSpec {
        family: Family::SpNC,
        pattern: "Sp(n,C)/Sp(n)",
        constraints: "n>1",
        table: 2,
        param_count: 1,
        check: |p| p[0] > 1,
        class: |_| CrownClass::Rigid,
    },
    RowSpec {
        family: Family::OtherExceptional,
        pattern: "exceptional(other)",
        constraints: "",
        table: 2,
        param_count: 0,
        check: |_| true,
        class: |_| CrownClass::Rigid,
    },
];

/// Looks up a family at concrete parameters.
pub fn lookup(family: Family, params: &[i64]) -> Result<AtlasEntry> {
    let row = ROWS
        .iter()
        .find(|r| r.family == family)
        .ok_or_else(|| Error::UnknownSpace(format!("{family:?}")))?;
    if params.len() != row.param_count {
        return Err(Error::OutOfRange(format!(
            "{} takes {} parameter(s), got {}",
            row.pattern,
            row.param_count,
            params.len()
        )));
    }
    if !(row.check)(params) {
        return Err(Error::OutOfRange(format!(
            "parameters {params:?} violate the row constraint `{}` of {}",
            if row.constraints.is_empty() {
                "params >= 1"
            } else {
                row.constraints
            },
            row.pattern
        )));
    }
    Ok(AtlasEntry {
        family: row.family,
        pattern: row.pattern,
        constraints: row.constraints,
        table: row.table,
        crown_class: (row.class)(params),
    })
}

/// All encoded rows in table order, with symbolic crown targets.
pub fn list_all() -> Vec<AtlasEntry> {
    ROWS.iter()
        .map(|row| AtlasEntry {
            family: row.family,
            pattern: row.pattern,
            constraints: row.constraints,
            table: row.table,
            crown_class: (row.class)(&[]),
        })
        .collect()
}

/// Parses a concrete descriptor such as `SL(3,R)/SO(3)` or
/// `SO0(4,1)/SO(4)` and looks it up. Parsing is strict: the quotient must
/// match a printed row shape with consistent integers.
pub fn lookup_str(descriptor: &str) -> Result<AtlasEntry> {
    let s: String = descriptor.chars().filter(|c| !c.is_whitespace()).collect();
    // Exceptional rows are exact strings.
    match s.as_str() {
        "(e6(-14),so(10)+R)" => return lookup(Family::E6M14, &[]),
        "(e7(-25),e6+R)" => return lookup(Family::E7M25, &[]),
        "(f4(-20),so(9))" => return lookup(Family::F4M20, &[]),
        "exceptional(other)" | "exceptional" => return lookup(Family::OtherExceptional, &[]),
        _ => {}
    }
    if let Some(v) = capture(&s, "SU(#,#)/S(U(#)xU(#))") {
        if v[0] == v[2] && v[1] == v[3] {
            return lookup(Family::SuPQ, &[v[0], v[1]]);
        }
    }
    if let Some(v) = capture(&s, "SO0(#,#)/(SO(#)xSO(#))") {
        if v[0] == v[2] && v[1] == v[3] {
            return match v[1] {
                2 => lookup(Family::So0P2, &[v[0]]),
                _ => lookup(Family::So0PQ, &[v[0], v[1]]),
            };
        }
    }
    if let Some(v) = capture(&s, "SO0(#,#)/SO(#)") {
        if v[1] == 1 && v[0] == v[2] {
            return lookup(Family::So0P1, &[v[0]]);
        }
    }
    if let Some(v) = capture(&s, "SO*(#)/U(#)") {
        if v[0] == 2 * v[1] {
            return lookup(Family::SoStar2n, &[v[1]]);
        }
    }
    if let Some(v) = capture(&s, "SU*(#)/Sp(#)") {
        if v[0] == 2 * v[1] {
            return lookup(Family::SuStar2n, &[v[1]]);
        }
    }
    if let Some(v) = capture(&s, "Sp(#,R)/U(#)") {
        if v[0] == v[1] {
            return lookup(Family::SpNR, &[v[0]]);
        }
    }
    if let Some(v) = capture(&s, "Sp(#,C)/Sp(#)") {
        if v[0] == v[1] {
            return lookup(Family::SpNC, &[v[0]]);
        }
    }
    if let Some(v) = capture(&s, "Sp(#,#)/(Sp(#)xSp(#))") {
        if v[0] == v[2] && v[1] == v[3] {
            return lookup(Family::SpPQ, &[v[0], v[1]]);
        }
    }
    if let Some(v) = capture(&s, "SL(#,R)/SO(#)") {
        if v[0] == v[1] {
            return lookup(Family::SlNR, &[v[0]]);
        }
    }
    if let Some(v) = capture(&s, "SL(#,C)/SU(#)") {
        if v[0] == v[1] {
            return lookup(Family::SlNC, &[v[0]]);
        }
    }
    if let Some(v) = capture(&s, "SO(#,C)/SO(#)") {
        if v[0] == v[1] {
            return lookup(Family::SoNC, &[v[0]]);
        }
    }
    Err(Error::UnknownSpace(descriptor.to_string()))
}

/// Matches `input` against a template where each `#` captures a positive
/// integer; all other characters must match exactly.
fn capture(input: &str, template: &str) -> Option<Vec<i64>> {
    let mut values = Vec::new();
    let inp: Vec<char> = input.chars().collect();
    let tpl: Vec<char> = template.chars().collect();
    let mut i = 0;
    let mut t = 0;
    while t < tpl.len() {
        if tpl[t] == '#' {
            let start = i;
            while i < inp.len() && inp[i].is_ascii_digit() {
                i += 1;
            }
            if i == start {
                return None;
            }
            values.push(inp[start..i].iter().collect::<String>().parse().ok()?);
            t += 1;
        } else {
            if i >= inp.len() || inp[i] != tpl[t] {
                return None;
            }
            i += 1;
            t += 1;
        }
    }
    (i == inp.len()).then_some(values)
}

/// Renders a concrete descriptor for a row instantiated at `params`
/// (used by the partition check and the CLI).
pub fn concrete_descriptor(family: Family, params: &[i64]) -> Result<String> {
    lookup(family, params)?;
    let s = match family {
        Family::SuPQ => format!(
            "SU({},{})/S(U({})xU({}))",
            params[0], params[1], params[0], params[1]
        ),
        Family::So0P2 => format!("SO0({},2)/(SO({})xSO(2))", params[0], params[0]),
        Family::SoStar2n => format!("SO*({})/U({})", 2 * params[0], params[0]),
        Family::SpNR => format!("Sp({},R)/U({})", params[0], params[0]),
        Family::E6M14 => "(e6(-14),so(10)+R)".into(),
        Family::E7M25 => "(e7(-25),e6+R)".into(),
        Family::So0P1 => format!("SO0({},1)/SO({})", params[0], params[0]),
        Family::SpPQ => format!(
            "Sp({},{})/(Sp({})xSp({}))",
            params[0], params[1], params[0], params[1]
        ),
        Family::F4M20 => "(f4(-20),so(9))".into(),
        Family::SlNR => format!("SL({},R)/SO({})", params[0], params[0]),
        Family::So0PQ => format!(
            "SO0({},{})/(SO({})xSO({}))",
            params[0], params[1], params[0], params[1]
        ),
        Family::SuStar2n => format!("SU*({})/Sp({})", 2 * params[0], params[0]),
        Family::SlNC => format!("SL({},C)/SU({})", params[0], params[0]),
        Family::SoNC => format!("SO({},C)/SO({})", params[0], params[0]),
        Family::SpNC => format!("Sp({},C)/Sp({})", params[0], params[0]),
        Family::OtherExceptional => "exceptional(other)".into(),
    };
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn row_counts() {
        let rows = list_all();
        assert_eq!(rows.len(), 16);
        let self_rows = rows
            .iter()
            .filter(|r| r.crown_class == CrownClass::HermitianSelf)
            .count();
        let target_rows = rows
            .iter()
            .filter(|r| matches!(r.crown_class, CrownClass::HermitianTarget(_)))
            .count();
        let rigid_rows = rows
            .iter()
            .filter(|r| r.crown_class == CrownClass::Rigid)
            .count();
        assert_eq!(self_rows, 6);
        assert_eq!(target_rows, 3);
        assert_eq!(rigid_rows, 7); // six named rows plus the marker
        assert!(rows
            .iter()
            .filter(|r| r.table == 1)
            .all(|r| r.crown_class != CrownClass::Rigid));
        assert!(rows
            .iter()
            .filter(|r| r.table == 2)
            .all(|r| r.crown_class == CrownClass::Rigid));
    }

    #[test]
    fn printed_examples() {
        let e = lookup(Family::SlNR, &[3]).unwrap();
        assert_eq!(e.crown_class, CrownClass::Rigid);
        let e = lookup(Family::So0P1, &[4]).unwrap();
        assert_eq!(
            e.crown_class,
            CrownClass::HermitianTarget("SO0(4,2)/(SO(4)xSO(2))".into())
        );
        let e = lookup(Family::SpNR, &[5]).unwrap();
        assert_eq!(e.crown_class, CrownClass::HermitianSelf);
        let e = lookup(Family::SpPQ, &[1, 2]).unwrap();
        assert_eq!(
            e.crown_class,
            CrownClass::HermitianTarget("SU(2,4)/S(U(2)xU(4))".into())
        );
    }

    #[test]
    fn out_of_range_and_unknown() {
        assert!(matches!(
            lookup(Family::SlNR, &[2]),
            Err(Error::OutOfRange(_))
        ));
        assert!(matches!(
            lookup(Family::So0P1, &[2]),
            Err(Error::OutOfRange(_))
        ));
        assert!(matches!(
            lookup(Family::SlNR, &[3, 4]),
            Err(Error::OutOfRange(_))
        ));
        assert!(matches!(
            lookup_str("G2(2)/SO(4)"),
            Err(Error::UnknownSpace(_))
        ));
    }

    #[test]
    fn string_lookups() {
        let e = lookup_str("SL(3,R)/SO(3)").unwrap();
        assert_eq!(e.family, Family::SlNR);
        assert_eq!(e.crown_class, CrownClass::Rigid);

        let e = lookup_str("SO0(4,1)/SO(4)").unwrap();
        assert_eq!(e.family, Family::So0P1);
        assert_eq!(
            e.crown_class,
            CrownClass::HermitianTarget("SO0(4,2)/(SO(4)xSO(2))".into())
        );

        let e = lookup_str("SO0(5,2)/(SO(5)xSO(2))").unwrap();
        assert_eq!(e.family, Family::So0P2);
        assert_eq!(e.table, 1);

        let e = lookup_str("SO0(5,4)/(SO(5)xSO(4))").unwrap();
        assert_eq!(e.family, Family::So0PQ);
        assert_eq!(e.table, 2);

        let e = lookup_str("Sp(2,R)/U(2)").unwrap();
        assert_eq!(e.family, Family::SpNR);
        let e = lookup_str("Sp(2,C)/Sp(2)").unwrap();
        assert_eq!(e.family, Family::SpNC);
        let e = lookup_str("SU*(6)/Sp(3)").unwrap();
        assert_eq!(e.family, Family::SuStar2n);
        let e = lookup_str("SO*(8)/U(4)").unwrap();
        assert_eq!(e.family, Family::SoStar2n);
        let e = lookup_str("(f4(-20),so(9))").unwrap();
        assert_eq!(e.family, Family::F4M20);

        // Excluded parameters are not rerouted.
        assert!(matches!(
            lookup_str("SL(2,R)/SO(2)"),
            Err(Error::OutOfRange(_))
        ));
        // Inconsistent quotients are unknown, not guessed.
        assert!(matches!(
            lookup_str("SU*(6)/Sp(2)"),
            Err(Error::UnknownSpace(_))
        ));
    }

    #[test]
    fn partition_over_concrete_instances() {
        // Instantiate every parametric row over a small grid and check that
        // no concrete space matches rows in both tables.
        let mut seen: BTreeMap<String, u8> = BTreeMap::new();
        let grid: Vec<Vec<i64>> = [vec![], (1..=10).map(|p| vec![p]).collect(), {
            let mut v = Vec::new();
            for p in 1..=10 {
                for q in 1..=10 {
                    v.push(vec![p, q]);
                }
            }
            v
        }]
        .concat();
        for row in list_all() {
            for params in &grid {
                if let Ok(entry) = lookup(row.family, params) {
                    let desc = concrete_descriptor(row.family, params).unwrap();
                    if let Some(&table) = seen.get(&desc) {
                        assert_eq!(table, entry.table, "{desc} appears in both tables");
                    } else {
                        seen.insert(desc.clone(), entry.table);
                    }
                    // The string path resolves to the same row.
                    if let Ok(parsed) = lookup_str(&desc) {
                        assert_eq!(parsed.family, entry.family, "descriptor {desc}");
                    }
                }
            }
        }
    }

    #[test]
    fn round_trip_every_row() {
        for row in list_all() {
            let params: Vec<i64> = match row.family {
                Family::SlNR | Family::SlNC => vec![3],
                Family::SoNC => vec![4],
                Family::SpNC => vec![2],
                Family::So0P1 => vec![3],
                Family::So0PQ => vec![3, 3],
                Family::SuPQ | Family::SpPQ => vec![1, 1],
                Family::So0P2 | Family::SoStar2n | Family::SpNR | Family::SuStar2n => vec![1],
                _ => vec![],
            };
            let entry = lookup(row.family, &params).unwrap();
            assert_eq!(entry.family, row.family);
            assert_eq!(entry.table, row.table);
            assert!(!entry.to_line().is_empty());
        }
    }

    #[test]
    fn line_format() {
        let e = lookup(Family::SlNR, &[3]).unwrap();
        assert_eq!(e.to_line(), "table2\tSL(n,R)/SO(n)\tn>2\trigid");
        let e = lookup(Family::SuPQ, &[2, 3]).unwrap();
        assert_eq!(
            e.to_line(),
            "table1\tSU(p,q)/S(U(p)xU(q))\t-\thermitian-self"
        );
    }
}
