//! Text persistence for [`CtmTable`].
//!
//! ```text
//! CTMv1 dims=<1|2> states=<k> symbols=2 max_steps=<t> total_machines=<M> total_halting=<H>
//! sha256=<hex digest of everything after this line>
//! <pattern>,<count>
//! ...
//! ```
//!
//! Entries are sorted lexicographically by pattern text and every entry line
//! ends with `\n`. Only integer counts are stored; complexities are derived on
//! load.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{CtmTable, MachineSpace, Pattern};
use crate::error::{Error, Result};

const MAGIC: &str = "CTMv1";

pub fn render_table(table: &CtmTable) -> String {
    let mut rows: Vec<(String, u64)> = table
        .counts()
        .iter()
        .map(|(p, &c)| (p.to_string(), c))
        .collect();
    rows.sort();
    let mut body = String::new();
    for (p, c) in rows {
        body.push_str(&p);
        body.push(',');
        body.push_str(&c.to_string());
        body.push('\n');
    }
    let space = table.space();
    format!(
        "{MAGIC} dims={} states={} symbols={} max_steps={} total_machines={} total_halting={}\nsha256={}\n{body}",
        space.dims,
        space.states,
        MachineSpace::SYMBOLS,
        space.max_steps,
        table.total_machines(),
        table.total_halting(),
        hex::encode(Sha256::digest(body.as_bytes())),
    )
}

pub fn parse_table(text: &str) -> Result<CtmTable> {
    let (header, rest) = text
        .split_once('\n')
        .ok_or_else(|| Error::MalformedTable("missing header line".into()))?;
    let (sum_line, body) = rest
        .split_once('\n')
        .ok_or_else(|| Error::MalformedTable("missing checksum line".into()))?;

    let mut fields = header.split(' ');
    let magic = fields.next().unwrap_or_default();
    if magic != MAGIC {
        if magic.starts_with("CTMv") {
            return Err(Error::TableVersion(magic.to_string()));
        }
        return Err(Error::MalformedTable(format!("bad magic `{magic}`")));
    }
    let mut kv = BTreeMap::new();
    for f in fields {
        let (k, v) = f
            .split_once('=')
            .ok_or_else(|| Error::MalformedTable(format!("header field `{f}`")))?;
        let v: u64 = v
            .parse()
            .map_err(|_| Error::MalformedTable(format!("header value `{f}`")))?;
        kv.insert(k, v);
    }
    let field = |k: &str| {
        kv.get(k)
            .copied()
            .ok_or_else(|| Error::MalformedTable(format!("header lacks `{k}`")))
    };
    if field("symbols")? != MachineSpace::SYMBOLS as u64 {
        return Err(Error::MalformedTable("only binary alphabets are supported".into()));
    }
    let narrow = |k: &str, v: u64| {
        u8::try_from(v).map_err(|_| Error::MalformedTable(format!("`{k}` out of range")))
    };
    let dims = narrow("dims", field("dims")?)?;
    let states = narrow("states", field("states")?)?;
    let max_steps = u32::try_from(field("max_steps")?)
        .map_err(|_| Error::MalformedTable("`max_steps` out of range".into()))?;
    let space = MachineSpace::new(dims, states, max_steps)
        .map_err(|e| Error::MalformedTable(e.to_string()))?;

    let expected = sum_line
        .strip_prefix("sha256=")
        .ok_or_else(|| Error::MalformedTable("missing sha256 line".into()))?;
    let actual = hex::encode(Sha256::digest(body.as_bytes()));
    if !expected.eq_ignore_ascii_case(&actual) {
        return Err(Error::Checksum {
            expected: expected.to_string(),
            actual,
        });
    }

    let mut counts = BTreeMap::new();
    for (lineno, line) in body.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let (p, c) = line
            .split_once(',')
            .ok_or_else(|| Error::MalformedTable(format!("entry line {}: `{line}`", lineno + 3)))?;
        let pattern = Pattern::parse(dims, p)?;
        let count: u64 = c
            .parse()
            .map_err(|_| Error::MalformedTable(format!("entry line {}: bad count", lineno + 3)))?;
        if counts.insert(pattern, count).is_some() {
            return Err(Error::MalformedTable(format!("duplicate pattern {p}")));
        }
    }
    CtmTable::from_counts(
        space,
        counts,
        field("total_machines")?,
        field("total_halting")?,
    )
}

pub fn save_table(table: &CtmTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render_table(table)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_table(path: impl AsRef<Path>) -> Result<CtmTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_table(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctm::build_table;

    #[test]
    fn corrupted_count_fails_checksum() {
        let t = build_table(MachineSpace::new(1, 1, 20).unwrap()).unwrap();
        let text = render_table(&t).replace("\n0,12\n", "\n0,13\n");
        assert!(matches!(parse_table(&text), Err(Error::Checksum { .. })));
    }

    #[test]
    fn version_and_header_errors() {
        let t = build_table(MachineSpace::new(1, 1, 20).unwrap()).unwrap();
        let text = render_table(&t);
        assert!(matches!(
            parse_table(&text.replacen("CTMv1", "CTMv2", 1)),
            Err(Error::TableVersion(_))
        ));
        assert!(matches!(parse_table("garbage"), Err(Error::MalformedTable(_))));
        assert!(matches!(
            parse_table(&text.replacen(" states=1", "", 1)),
            Err(Error::MalformedTable(_))
        ));
    }
}
