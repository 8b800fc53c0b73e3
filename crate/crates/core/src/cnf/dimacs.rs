//! DIMACS `cnf` format. Variable tags travel as `c meta <id> <tag>` comment
//! lines placed before the header.

use super::{CnfFormula, Lit};
use crate::error::{Error, Result};

pub fn write_dimacs(f: &CnfFormula) -> String {
    let mut out = String::new();
    for (id, tag) in f.var_meta() {
        out.push_str(&format!("c meta {id} {tag}\n"));
    }
    out.push_str(&format!("p cnf {} {}\n", f.num_vars(), f.clauses().len()));
    for clause in f.clauses() {
        for l in clause {
            out.push_str(&l.to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Dimacs {
        line,
        message: message.into(),
    }
}

pub fn read_dimacs(text: &str) -> Result<CnfFormula> {
    let mut formula: Option<CnfFormula> = None;
    let mut declared_clauses = 0usize;
    let mut meta = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            if !(rest.is_empty() || rest.starts_with(char::is_whitespace)) {
                return Err(err(line_no, "unexpected token"));
            }
            let rest = rest.trim_start();
            if let Some(m) = rest.strip_prefix("meta ") {
                let (id, tag) = m
                    .trim_start()
                    .split_once(' ')
                    .ok_or_else(|| err(line_no, "meta line needs an id and a tag"))?;
                let id: u32 = id
                    .parse()
                    .map_err(|_| err(line_no, format!("bad meta variable id `{id}`")))?;
                meta.push((line_no, id, tag.to_string()));
            }
            continue;
        }
        if line.starts_with('p') {
            if formula.is_some() {
                return Err(err(line_no, "duplicate header"));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [_, "cnf", vars, clauses] = fields.as_slice() else {
                return Err(err(
                    line_no,
                    "malformed header, expected `p cnf <vars> <clauses>`",
                ));
            };
            let vars: u32 = vars
                .parse()
                .map_err(|_| err(line_no, "malformed variable count"))?;
            declared_clauses = clauses
                .parse()
                .map_err(|_| err(line_no, "malformed clause count"))?;
            formula = Some(CnfFormula::new(vars));
            continue;
        }
        let f = formula
            .as_mut()
            .ok_or_else(|| err(line_no, "clause before header"))?;
        for token in line.split_whitespace() {
            let v: i64 = token
                .parse()
                .map_err(|_| err(line_no, format!("bad literal `{token}`")))?;
            if v == 0 {
                if current.is_empty() {
                    return Err(err(line_no, "empty clause"));
                }
                f.add_clause(std::mem::take(&mut current))?;
                continue;
            }
            if v.unsigned_abs() > f.num_vars() as u64 {
                return Err(Error::LiteralOutOfRange {
                    literal: v,
                    num_vars: f.num_vars(),
                });
            }
            current.push(Lit::from_dimacs(v as i32).unwrap());
        }
    }

    let mut f = formula.ok_or_else(|| err(last_line, "missing header"))?;
    if !current.is_empty() {
        return Err(err(last_line, "last clause is missing its 0 terminator"));
    }
    if f.clauses().len() != declared_clauses {
        return Err(err(
            last_line,
            format!(
                "header declares {declared_clauses} clauses, found {}",
                f.clauses().len()
            ),
        ));
    }
    for (line_no, id, tag) in meta {
        if id == 0 || id > f.num_vars() {
            return Err(err(line_no, format!("meta for unknown variable {id}")));
        }
        f.set_meta(id, tag);
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn writes_plain_formula() {
        let mut f = CnfFormula::new(2);
        f.add_clause(vec![Lit::pos(1), Lit::neg(2)]).unwrap();
        assert_eq!(write_dimacs(&f), "p cnf 2 1\n1 -2 0\n");
    }

    #[test]
    fn meta_round_trip() {
        let mut f = CnfFormula::new(0);
        let a = f.new_var("z i=0 y=2".to_string());
        let b = f.new_var(None);
        f.add_clause(vec![Lit::pos(a)]).unwrap();
        f.add_clause(vec![Lit::neg(a), Lit::pos(b)]).unwrap();
        let text = write_dimacs(&f);
        assert_eq!(text, "c meta 1 z i=0 y=2\np cnf 2 2\n1 0\n-1 2 0\n");
        assert_eq!(read_dimacs(&text).unwrap(), f);
    }

    #[test]
    fn reads_multiline_clauses_and_comments() {
        let f = read_dimacs("c hello\np cnf 3 2\n1 2\n -3 0 2\n0\n").unwrap();
        assert_eq!(f.clauses().len(), 2);
        assert_eq!(f.clauses()[0], vec![Lit::pos(1), Lit::pos(2), Lit::neg(3)]);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!(
            read_dimacs("p cnf x 1\n1 0\n"),
            Err(Error::Dimacs { line: 1, .. })
        ));
        assert!(matches!(
            read_dimacs("p dnf 1 1\n1 0\n"),
            Err(Error::Dimacs { .. })
        ));
        assert!(matches!(read_dimacs("1 0\n"), Err(Error::Dimacs { .. })));
        assert!(matches!(read_dimacs(""), Err(Error::Dimacs { .. })));
        assert!(matches!(
            read_dimacs("p cnf 2 1\n1 3 0\n"),
            Err(Error::LiteralOutOfRange {
                literal: 3,
                num_vars: 2
            })
        ));
        assert!(matches!(
            read_dimacs("p cnf 2 1\n1 2\n"),
            Err(Error::Dimacs { .. })
        ));
        assert!(matches!(
            read_dimacs("p cnf 2 2\n1 2 0\n"),
            Err(Error::Dimacs { .. })
        ));
        assert!(matches!(
            read_dimacs("p cnf 2 1\n1 a 0\n"),
            Err(Error::Dimacs { line: 2, .. })
        ));
    }

    fn arb_formula() -> impl Strategy<Value = CnfFormula> {
        (1u32..20).prop_flat_map(|n| {
            let lit = (1..=n, any::<bool>())
                .prop_map(|(v, neg)| if neg { Lit::neg(v) } else { Lit::pos(v) });
            let clauses = prop::collection::vec(prop::collection::vec(lit, 1..5), 0..30);
            let tags = prop::collection::btree_map(
                1..=n,
                "[a-z][a-z0-9=]{0,6}( [a-z0-9=]{1,6}){0,3}",
                0..5,
            );
            (clauses, tags).prop_map(move |(clauses, tags)| {
                let mut f = CnfFormula::new(n);
                for c in clauses {
                    f.add_clause(c).unwrap();
                }
                for (id, tag) in tags {
                    f.set_meta(id, tag);
                }
                f
            })
        })
    }

    proptest! {
        #[test]
        fn dimacs_round_trip(f in arb_formula()) {
            prop_assert_eq!(read_dimacs(&write_dimacs(&f)).unwrap(), f);
        }
    }
}
