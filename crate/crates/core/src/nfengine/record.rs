//! Class-group records and their plain-text file formats.
//!
//! ```text
//! WTREC 1
//! field <label> <degree> <coefficients low to high>
//! group <d1> <d2> ...
//! action <name> <r×r entries, row-major, column j = image of generator j>
//! norm_to <label> <rows> <cols> <entries row-major>
//! ideal <symbolic generator label>
//! assurance heuristic|pinned|ingested-trusted
//! provenance <free text>
//! ```
//!
//! A second record kind carries a single group order:
//!
//! ```text
//! WTORD 1
//! field <label> <degree> <coefficients>
//! h2_order <n>
//! provenance <free text>
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::field::{polynomial_for_label, NumberFieldDesc};
use super::poly::ZPoly;
use crate::error::{Error, Result};
use crate::exactalg::{FiniteAbelianGroup, GroupHom, IntMatrix};
use crate::galmod::FiniteGaloisModule;

/// How far a value can be trusted; ordered from weakest to strongest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Assurance {
    Heuristic,
    IngestedTrusted,
    Pinned,
}

impl Assurance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Assurance::Heuristic => "heuristic",
            Assurance::IngestedTrusted => "ingested-trusted",
            Assurance::Pinned => "pinned",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "heuristic" => Ok(Assurance::Heuristic),
            "ingested-trusted" => Ok(Assurance::IngestedTrusted),
            "pinned" => Ok(Assurance::Pinned),
            _ => Err(Error::invalid(format!("unknown assurance level {s:?}"))),
        }
    }
}

impl fmt::Display for Assurance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Computed,
    Ingested,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormMap {
    pub target_label: String,
    /// rows = rank of the target group, columns = rank of this record's group.
    pub matrix: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroupRecord {
    pub field: NumberFieldDesc,
    /// 3-part of the class group of the ring of 3-integers.
    pub s_class_group: FiniteAbelianGroup,
    pub generator_ideals: Vec<String>,
    pub galois_actions: BTreeMap<String, IntMatrix>,
    pub norm_to: Option<NormMap>,
    pub provenance: Provenance,
    pub provenance_note: String,
    pub assurance: Assurance,
}

/// The order of H²_ét(o'_k, Z₃(2)) supplied from outside.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderRecord {
    pub label: String,
    pub poly: ZPoly,
    pub h2_order: BigInt,
    pub provenance_note: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParsedRecord {
    Group(ClassGroupRecord),
    Order(OrderRecord),
}

impl ClassGroupRecord {
    /// The group with its actions as a Galois module (modulus = exponent).
    pub fn module(&self) -> Result<FiniteGaloisModule> {
        let actors = self.galois_actions.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        FiniteGaloisModule::new(self.s_class_group.clone(), actors, None)
    }

    pub fn action(&self, name: &str) -> Option<GroupHom> {
        self.galois_actions
            .get(name)
            .and_then(|m| GroupHom::new(self.s_class_group.clone(), self.s_class_group.clone(), m.clone()).ok())
    }

    /// The norm map as a homomorphism into the given target record.
    pub fn norm_hom(&self, target: &ClassGroupRecord) -> Result<GroupHom> {
        let nm = self.norm_to.as_ref().ok_or_else(|| Error::MissingData(format!("{} has no norm map", self.field.label)))?;
        if nm.target_label != target.field.label {
            return Err(Error::invalid(format!(
                "norm of {} points to {}, not {}",
                self.field.label, nm.target_label, target.field.label
            )));
        }
        GroupHom::new(self.s_class_group.clone(), target.s_class_group.clone(), nm.matrix.clone())
            .map_err(|e| Error::validation("norm map well-defined", e.to_string()))
    }

    /// Checks the invariants that do not need other records.
    pub fn validate(&self) -> Result<()> {
        let g = &self.s_class_group;
        if !g.is_p_group(3) && !g.is_trivial() {
            return Err(Error::validation("3-group", format!("group {g} is not a 3-group")));
        }
        if let Some(p) = polynomial_for_label(&self.field.label) {
            if p != self.field.poly {
                return Err(Error::validation(
                    "field polynomial",
                    format!("polynomial of {} differs from its canonical form", self.field.label),
                ));
            }
        }
        let r = g.rank();
        for (name, m) in &self.galois_actions {
            if m.rows() != r || m.cols() != r {
                return Err(Error::validation("action dimensions", format!("action {name} is not {r}×{r}")));
            }
        }
        self.module().map_err(|e| match e {
            Error::Validation { .. } => e,
            other => Error::validation("action", other.to_string()),
        })?;
        if let Some(nm) = &self.norm_to {
            if nm.matrix.cols() != r {
                return Err(Error::validation(
                    "norm dimensions",
                    format!("norm_to has {} columns for a group of rank {r}", nm.matrix.cols()),
                ));
            }
        }
        Ok(())
    }

    /// Checks the norm map against its target: well-defined and equivariant for shared actions.
    pub fn validate_against(&self, target: &ClassGroupRecord) -> Result<()> {
        let n = self.norm_hom(target)?;
        for (name, _) in &self.galois_actions {
            let down = match target.action(name) {
                Some(a) => a,
                // γ restricts to the identity on the base level
                None if name == "gamma" && !target.galois_actions.contains_key("gamma") => {
                    GroupHom::identity(&target.s_class_group)
                }
                None => continue,
            };
            let up = self.action(name).expect("validated");
            if n.compose(&up)? != down.compose(&n)? {
                return Err(Error::validation(
                    "norm equivariance",
                    format!("norm {} → {} does not commute with {name}", self.field.label, target.field.label),
                ));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("WTREC 1\n");
        out.push_str(&field_line(&self.field.label, &self.field.poly));
        out.push_str("group");
        for d in self.s_class_group.invariant_factors() {
            out.push_str(&format!(" {d}"));
        }
        out.push('\n');
        for (name, m) in &self.galois_actions {
            out.push_str(&format!("action {name}"));
            for e in m.entries() {
                out.push_str(&format!(" {e}"));
            }
            out.push('\n');
        }
        if let Some(nm) = &self.norm_to {
            out.push_str(&format!("norm_to {} {} {}", nm.target_label, nm.matrix.rows(), nm.matrix.cols()));
            for e in nm.matrix.entries() {
                out.push_str(&format!(" {e}"));
            }
            out.push('\n');
        }
        for id in &self.generator_ideals {
            out.push_str(&format!("ideal {id}\n"));
        }
        out.push_str(&format!("assurance {}\n", self.assurance));
        let kind = match self.provenance {
            Provenance::Computed => "computed",
            Provenance::Ingested => "ingested",
        };
        out.push_str(&format!("origin {kind}\n"));
        out.push_str(&format!("provenance {}\n", self.provenance_note));
        out
    }
}

impl OrderRecord {
    pub fn to_text(&self) -> String {
        format!(
            "WTORD 1\n{}h2_order {}\nprovenance {}\n",
            field_line(&self.label, &self.poly),
            self.h2_order,
            self.provenance_note
        )
    }
}

fn field_line(label: &str, poly: &ZPoly) -> String {
    let mut s = format!("field {label} {}", poly.degree());
    for c in poly.coeffs() {
        s.push_str(&format!(" {c}"));
    }
    s.push('\n');
    s
}

fn parse_ints(tokens: &[&str], what: &str) -> Result<Vec<BigInt>> {
    tokens
        .iter()
        .map(|t| t.parse::<BigInt>().map_err(|_| Error::invalid(format!("{what}: {t:?} is not an integer"))))
        .collect()
}

fn parse_field(rest: &[&str]) -> Result<(String, ZPoly)> {
    if rest.len() < 2 {
        return Err(Error::invalid("field line needs a label and a degree"));
    }
    let label = rest[0].to_string();
    let deg: usize = rest[1].parse().map_err(|_| Error::invalid("field degree is not an integer"))?;
    let coeffs = parse_ints(&rest[2..], "field coefficient")?;
    if coeffs.len() != deg + 1 {
        return Err(Error::invalid(format!("field line has {} coefficients for degree {deg}", coeffs.len())));
    }
    Ok((label, ZPoly::new(coeffs)))
}

/// Parses either record kind. Group records are returned unvalidated.
pub fn parse_record(text: &str) -> Result<ParsedRecord> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::invalid("empty record"))?;
    match header {
        "WTREC 1" => parse_group_record(lines).map(ParsedRecord::Group),
        "WTORD 1" => parse_order_record(lines).map(ParsedRecord::Order),
        other => Err(Error::invalid(format!("unknown record header {other:?}"))),
    }
}

fn parse_order_record<'a>(lines: impl Iterator<Item = &'a str>) -> Result<OrderRecord> {
    let (mut field, mut order, mut prov) = (None, None, String::new());
    for line in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "field" => field = Some(parse_field(&toks[1..])?),
            "h2_order" => {
                let v = parse_ints(&toks[1..], "h2_order")?;
                if v.len() != 1 || v[0] < BigInt::from(1) {
                    return Err(Error::invalid("h2_order needs one positive integer"));
                }
                order = Some(v[0].clone());
            }
            "provenance" => prov = line["provenance".len()..].trim().to_string(),
            other => return Err(Error::invalid(format!("unknown line kind {other:?}"))),
        }
    }
    let (label, poly) = field.ok_or_else(|| Error::invalid("missing field line"))?;
    let h2_order = order.ok_or_else(|| Error::invalid("missing h2_order line"))?;
    Ok(OrderRecord { label, poly, h2_order, provenance_note: prov })
}

fn parse_group_record<'a>(lines: impl Iterator<Item = &'a str>) -> Result<ClassGroupRecord> {
    let mut field = None;
    let mut group: Option<FiniteAbelianGroup> = None;
    let mut actions = BTreeMap::new();
    let mut norm_to = None;
    let mut ideals = Vec::new();
    let mut assurance = None;
    let mut origin = Provenance::Ingested;
    let mut prov = String::new();
    for line in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "field" => field = Some(parse_field(&toks[1..])?),
            "group" => {
                let f = parse_ints(&toks[1..], "group")?;
                if f.iter().any(|d| d < &BigInt::from(1)) {
                    return Err(Error::validation("invariant factors", "invariant factors must be positive"));
                }
                group = Some(
                    FiniteAbelianGroup::from_invariant_factors(f)
                        .map_err(|e| Error::validation("invariant factors", e.to_string()))?,
                );
            }
            "action" => {
                let g = group.as_ref().ok_or_else(|| Error::invalid("action before group line"))?;
                let name = toks.get(1).ok_or_else(|| Error::invalid("action without a name"))?.to_string();
                let r = g.rank();
                let e = parse_ints(&toks[2..], "action entry")?;
                if e.len() != r * r {
                    return Err(Error::validation(
                        "action dimensions",
                        format!("action {name} has {} entries for rank {r}", e.len()),
                    ));
                }
                if actions.insert(name.clone(), IntMatrix::from_vec(r, r, e)).is_some() {
                    return Err(Error::invalid(format!("duplicate action {name}")));
                }
            }
            "norm_to" => {
                if toks.len() < 4 {
                    return Err(Error::invalid("norm_to needs a label and dimensions"));
                }
                let rows: usize = toks[2].parse().map_err(|_| Error::invalid("norm_to rows"))?;
                let cols: usize = toks[3].parse().map_err(|_| Error::invalid("norm_to cols"))?;
                let e = parse_ints(&toks[4..], "norm_to entry")?;
                if e.len() != rows * cols {
                    return Err(Error::validation("norm dimensions", format!("norm_to has {} entries for {rows}×{cols}", e.len())));
                }
                norm_to = Some(NormMap { target_label: toks[1].to_string(), matrix: IntMatrix::from_vec(rows, cols, e) });
            }
            "ideal" => ideals.push(line["ideal".len()..].trim().to_string()),
            "assurance" => assurance = Some(Assurance::parse(toks.get(1).copied().unwrap_or(""))?),
            "origin" => {
                origin = match toks.get(1).copied() {
                    Some("computed") => Provenance::Computed,
                    Some("ingested") => Provenance::Ingested,
                    _ => return Err(Error::invalid("origin must be computed or ingested")),
                }
            }
            "provenance" => prov = line["provenance".len()..].trim().to_string(),
            other => return Err(Error::invalid(format!("unknown line kind {other:?}"))),
        }
    }
    let (label, poly) = field.ok_or_else(|| Error::invalid("missing field line"))?;
    let group = group.ok_or_else(|| Error::invalid("missing group line"))?;
    let field = NumberFieldDesc::new(poly, label)?;
    let assurance = assurance.unwrap_or(match origin {
        Provenance::Ingested => Assurance::IngestedTrusted,
        Provenance::Computed => Assurance::Heuristic,
    });
    Ok(ClassGroupRecord {
        field,
        s_class_group: group,
        generator_ideals: ideals,
        galois_actions: actions,
        norm_to,
        provenance: origin,
        provenance_note: prov,
        assurance,
    })
}

/// Reads and validates one record file.
pub fn ingest_record(path: &Path) -> Result<ParsedRecord> {
    let text = std::fs::read_to_string(path)?;
    let rec = parse_record(&text)?;
    match rec {
        ParsedRecord::Group(mut r) => {
            r.provenance = Provenance::Ingested;
            if r.assurance > Assurance::IngestedTrusted {
                r.assurance = Assurance::IngestedTrusted;
            }
            r.validate()?;
            Ok(ParsedRecord::Group(r))
        }
        ParsedRecord::Order(o) => {
            if let Some(p) = polynomial_for_label(&o.label) {
                if p != o.poly {
                    return Err(Error::validation("field polynomial", format!("polynomial of {} is not canonical", o.label)));
                }
            }
            Ok(ParsedRecord::Order(o))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "WTREC 1\nfield Q(sqrt(-14))[n=1] 6 4047 90 597 -2 36 0 1\ngroup 3\naction gamma 1\nnorm_to Q(sqrt(-14)) 0 1\nprovenance test\n";

    #[test]
    fn parse_and_round_trip() {
        let ParsedRecord::Group(r) = parse_record(SAMPLE).unwrap() else { panic!() };
        r.validate().unwrap();
        assert_eq!(r.s_class_group, FiniteAbelianGroup::from_u64(&[3]).unwrap());
        assert_eq!(r.assurance, Assurance::IngestedTrusted);
        let text = r.to_text();
        let ParsedRecord::Group(r2) = parse_record(&text).unwrap() else { panic!() };
        assert_eq!(r, r2);
        assert_eq!(text, r2.to_text());
    }

    #[test]
    fn rejects_non_commuting_actions() {
        let t = "WTREC 1\nfield Q(sqrt(-14)) 2 14 0 1\ngroup 3 3\naction a 1 1 0 1\naction b 1 0 1 1\nprovenance x\n";
        let ParsedRecord::Group(r) = parse_record(t).unwrap() else { panic!() };
        let err = r.validate().unwrap_err().to_string();
        assert!(err.contains("commut"), "{err}");
    }

    #[test]
    fn rejects_wrong_polynomial_and_bad_dims() {
        let t = "WTREC 1\nfield Q(sqrt(-14)) 2 13 0 1\ngroup\nprovenance x\n";
        let ParsedRecord::Group(r) = parse_record(t).unwrap() else { panic!() };
        assert!(r.validate().is_err());
        let t = "WTREC 1\nfield Q(sqrt(-14)) 2 14 0 1\ngroup 3\naction gamma 1 0\nprovenance x\n";
        assert!(parse_record(t).is_err());
    }

    #[test]
    fn empty_group_accepted() {
        let t = "WTREC 1\nfield Q(sqrt(-14)) 2 14 0 1\ngroup\nprovenance x\n";
        let ParsedRecord::Group(r) = parse_record(t).unwrap() else { panic!() };
        r.validate().unwrap();
        assert!(r.s_class_group.is_trivial());
    }

    #[test]
    fn order_records() {
        let t = "WTORD 1\nfield Q(sqrt(-11217)) 2 2804 -1 1\nh2_order 9\nprovenance table\n";
        let ParsedRecord::Order(o) = parse_record(t).unwrap() else { panic!() };
        assert_eq!(o.h2_order, BigInt::from(9));
        assert_eq!(parse_record(&o.to_text()).unwrap(), ParsedRecord::Order(o));
    }
}
