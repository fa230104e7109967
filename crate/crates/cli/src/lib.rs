//! std companion to the core crate: parameter-string parsing, serializable
//! reports, and the batch sweep harness behind the `bstriangle` binary.

pub mod report;
pub mod sweep;

use bstriangle_core::triangle::TriangleParams;
use bstriangle_core::BigInt;

/// Parses `a,b;c,d;e,f`. Whitespace around entries is ignored. Errors name
/// the offending pair and entry.
pub fn parse_params(input: &str) -> Result<TriangleParams, String> {
    let pairs: Vec<&str> = input.split(';').collect();
    if pairs.len() != 3 {
        return Err(format!(
            "expected 3 pairs separated by `;`, found {} in `{input}`",
            pairs.len()
        ));
    }
    let mut values: Vec<BigInt> = Vec::with_capacity(6);
    for (i, pair) in pairs.iter().enumerate() {
        let entries: Vec<&str> = pair.split(',').collect();
        if entries.len() != 2 {
            return Err(format!(
                "pair {}: expected 2 comma-separated integers, found {}",
                i + 1,
                entries.len()
            ));
        }
        for (j, entry) in entries.iter().enumerate() {
            let text = entry.trim();
            let value: BigInt = text
                .parse()
                .map_err(|_| format!("pair {}, entry {}: invalid integer `{text}`", i + 1, j + 1))?;
            values.push(value);
        }
    }
    TriangleParams::new([
        (values[0].clone(), values[1].clone()),
        (values[2].clone(), values[3].clone()),
        (values[4].clone(), values[5].clone()),
    ])
    .map_err(|e| e.to_string())
}
