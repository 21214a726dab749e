//! Minimal fixed-column PDB reader producing per-chain Cα traces.
//!
//! Only the first model's ATOM records are considered, and of those only
//! alpha-carbon atoms with blank or 'A' alternate locations. Chain breaks
//! are flagged wherever residue numbering jumps or the virtual bond length
//! falls outside 2.0..4.5 angstroms.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PdbError {
    #[error("no ATOM records found")]
    EmptyInput,
    #[error("malformed ATOM record at line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
}

/// Fields of one ATOM record relevant to trace extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomRecord {
    pub serial: i64,
    pub atom_name: String,
    pub alt_loc: char,
    pub res_name: String,
    pub chain_id: char,
    pub res_seq: i64,
    pub i_code: char,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// One residue of a Cα trace.
#[derive(Debug, Clone, PartialEq)]
pub struct CaResidue {
    pub res_seq: i64,
    pub i_code: char,
    pub aa: char,
    pub pos: [f64; 3],
}

/// Ordered Cα trace of one chain, with break flags between neighbors.
#[derive(Debug, Clone, PartialEq)]
pub struct CaTrace {
    pub chain_id: char,
    pub residues: Vec<CaResidue>,
    /// `gap_after[i]` marks a break between residues `i` and `i + 1`.
    pub gap_after: Vec<bool>,
}

const MIN_CA_DIST: f64 = 2.0;
const MAX_CA_DIST: f64 = 4.5;

fn field(line: &str, lo: usize, hi: usize) -> &str {
    // columns are 0-based byte ranges; short lines read as blank
    let bytes = line.as_bytes();
    let hi = hi.min(bytes.len());
    if lo >= hi {
        ""
    } else {
        std::str::from_utf8(&bytes[lo..hi]).unwrap_or("")
    }
}

fn char_at(line: &str, idx: usize) -> char {
    line.as_bytes().get(idx).map(|&b| b as char).unwrap_or(' ')
}

/// Parse one ATOM line by fixed columns.
pub fn parse_atom_line(line: &str, line_no: usize) -> Result<AtomRecord, PdbError> {
    let bad = |reason: &str| PdbError::MalformedLine { line: line_no, reason: reason.into() };
    if line.len() < 54 {
        return Err(bad("line shorter than coordinate columns"));
    }
    let serial = field(line, 6, 11).trim().parse().map_err(|_| bad("unparsable serial number"))?;
    let atom_name = field(line, 12, 16).trim().to_string();
    if atom_name.is_empty() {
        return Err(bad("blank atom name"));
    }
    let res_seq =
        field(line, 22, 26).trim().parse().map_err(|_| bad("unparsable residue number"))?;
    let x = field(line, 30, 38).trim().parse().map_err(|_| bad("unparsable x coordinate"))?;
    let y = field(line, 38, 46).trim().parse().map_err(|_| bad("unparsable y coordinate"))?;
    let z = field(line, 46, 54).trim().parse().map_err(|_| bad("unparsable z coordinate"))?;
    Ok(AtomRecord {
        serial,
        atom_name,
        alt_loc: char_at(line, 16),
        res_name: field(line, 17, 20).trim().to_string(),
        chain_id: char_at(line, 21),
        res_seq,
        i_code: char_at(line, 26),
        x,
        y,
        z,
    })
}

/// Render an ATOM record back into fixed columns.
pub fn format_atom_line(a: &AtomRecord) -> String {
    // atom names shorter than 4 characters start in column 14
    let name =
        if a.atom_name.len() < 4 { format!(" {:<3}", a.atom_name) } else { a.atom_name.clone() };
    format!(
        "ATOM  {:>5} {:<4}{}{:>3} {}{:>4}{}   {:>8.3}{:>8.3}{:>8.3}  1.00  0.00",
        a.serial, name, a.alt_loc, a.res_name, a.chain_id, a.res_seq, a.i_code, a.x, a.y, a.z
    )
}

/// Parse PDB text into per-chain Cα traces (first model only).
pub fn parse_pdb(text: &str) -> Result<Vec<CaTrace>, PdbError> {
    let mut atoms: Vec<AtomRecord> = Vec::new();
    let mut saw_atom = false;
    for (idx, line) in text.lines().enumerate() {
        if line.starts_with("ENDMDL") {
            break;
        }
        if !line.starts_with("ATOM") {
            continue;
        }
        saw_atom = true;
        let atom = parse_atom_line(line, idx + 1)?;
        if atom.atom_name != "CA" {
            continue;
        }
        if atom.alt_loc != ' ' && atom.alt_loc != 'A' {
            continue;
        }
        atoms.push(atom);
    }
    if !saw_atom {
        return Err(PdbError::EmptyInput);
    }

    // group by chain in file order; keep the first CA per residue identity
    let mut traces: Vec<CaTrace> = Vec::new();
    for atom in atoms {
        let trace = match traces.iter_mut().find(|t| t.chain_id == atom.chain_id) {
            Some(t) => t,
            None => {
                traces.push(CaTrace {
                    chain_id: atom.chain_id,
                    residues: Vec::new(),
                    gap_after: Vec::new(),
                });
                traces.last_mut().unwrap()
            }
        };
        if trace
            .residues
            .last()
            .is_some_and(|r| r.res_seq == atom.res_seq && r.i_code == atom.i_code)
        {
            continue;
        }
        trace.residues.push(CaResidue {
            res_seq: atom.res_seq,
            i_code: atom.i_code,
            aa: three_to_one(&atom.res_name),
            pos: [atom.x, atom.y, atom.z],
        });
    }

    for trace in &mut traces {
        trace.gap_after = trace
            .residues
            .windows(2)
            .map(|w| {
                let dseq = w[1].res_seq - w[0].res_seq;
                let numbering_ok = dseq == 0 || dseq == 1;
                let d: f64 = w[0]
                    .pos
                    .iter()
                    .zip(&w[1].pos)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                !(numbering_ok && (MIN_CA_DIST..=MAX_CA_DIST).contains(&d))
            })
            .collect();
    }
    Ok(traces)
}

/// Standard 20-residue three-to-one mapping; anything else becomes 'X'.
pub fn three_to_one(res_name: &str) -> char {
    match res_name {
        "ALA" => 'A',
        "ARG" => 'R',
        "ASN" => 'N',
        "ASP" => 'D',
        "CYS" => 'C',
        "GLN" => 'Q',
        "GLU" => 'E',
        "GLY" => 'G',
        "HIS" => 'H',
        "ILE" => 'I',
        "LEU" => 'L',
        "LYS" => 'K',
        "MET" => 'M',
        "PHE" => 'F',
        "PRO" => 'P',
        "SER" => 'S',
        "THR" => 'T',
        "TRP" => 'W',
        "TYR" => 'Y',
        "VAL" => 'V',
        _ => 'X',
    }
}

/// Inverse of [`three_to_one`] for the standard residues; used when writing
/// synthetic fixtures.
pub fn one_to_three(aa: char) -> &'static str {
    match aa {
        'A' => "ALA",
        'R' => "ARG",
        'N' => "ASN",
        'D' => "ASP",
        'C' => "CYS",
        'Q' => "GLN",
        'E' => "GLU",
        'G' => "GLY",
        'H' => "HIS",
        'I' => "ILE",
        'L' => "LEU",
        'K' => "LYS",
        'M' => "MET",
        'F' => "PHE",
        'P' => "PRO",
        'S' => "SER",
        'T' => "THR",
        'W' => "TRP",
        'Y' => "TYR",
        'V' => "VAL",
        _ => "UNK",
    }
}
