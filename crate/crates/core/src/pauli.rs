//! Hermitian qubit operators as real-weighted sums of Pauli strings.
//!
//! Qubit `0` is the leftmost letter of a string and maps to the most
//! significant bit of a computational-basis index (see [`crate::simulator`]).
//!
//! # File format
//!
//! ```text
//! # optional comments
//! 4
//! # ref: 0101
//! -0.5 ZZII
//! 0.25 XXYY
//! ```
//!
//! The first non-comment line holds the qubit count. Every following
//! non-empty line is `<coefficient> <string>`. `#` starts a comment, and a
//! comment of the form `# ref: <bits>` carries a suggested reference state.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Open01};

use crate::error::{Error, Result};

/// Terms whose merged coefficient falls below this are dropped.
pub const MERGE_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::InvalidLetter(other)),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A tensor product of single-qubit Paulis on `n` qubits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidInput("Pauli string on zero qubits".into()));
        }
        Ok(Self { letters })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(vec![Pauli::I; n])
    }

    /// String with `ops` placed on the given qubits and identity elsewhere.
    pub fn from_sparse(n: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut letters = vec![Pauli::I; n];
        for &(q, p) in ops {
            if q >= n {
                return Err(Error::InvalidInput(format!("qubit {q} out of range for n = {n}")));
            }
            letters[q] = p;
        }
        Self::new(letters)
    }

    pub fn num_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    /// Bit masks for the action on basis index `b`:
    /// `P|b> = i^{n_y} (-1)^{popcount(b & z)} |b ^ x>`.
    pub fn masks(&self) -> (usize, usize, u32) {
        let n = self.letters.len();
        let mut x = 0usize;
        let mut z = 0usize;
        let mut n_y = 0u32;
        for (q, &p) in self.letters.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => x |= bit,
                Pauli::Z => z |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit;
                    n_y += 1;
                }
            }
        }
        (x, z, n_y)
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s.chars().map(Pauli::from_char).collect::<Result<Vec<_>>>()?;
        Self::new(letters)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

/// A Hermitian operator `sum_k c_k P_k` with real `c_k`, kept in merged
/// form: no two terms share a string and no coefficient is below
/// [`MERGE_TOLERANCE`] in magnitude. Term order is first appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: Vec<(f64, PauliString)>,
}

impl PauliSum {
    /// Builds a merged sum. Fails on mixed qubit counts or non-finite weights.
    pub fn new(n: usize, terms: impl IntoIterator<Item = (f64, PauliString)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("operator on zero qubits".into()));
        }
        let mut index: HashMap<PauliString, usize> = HashMap::new();
        let mut merged: Vec<(f64, PauliString)> = Vec::new();
        for (c, s) in terms {
            if s.num_qubits() != n {
                return Err(Error::DimensionMismatch { expected: n, found: s.num_qubits() });
            }
            if !c.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite coefficient {c}")));
            }
            match index.get(&s) {
                Some(&k) => merged[k].0 += c,
                None => {
                    index.insert(s.clone(), merged.len());
                    merged.push((c, s));
                }
            }
        }
        merged.retain(|(c, _)| c.abs() >= MERGE_TOLERANCE);
        Ok(Self { n, terms: merged })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::new(n, std::iter::empty())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the dense matrix has no imaginary entries (every string
    /// carries an even number of `Y`s).
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(_, s)| s.masks().2 % 2 == 0)
    }

    /// Returns the operator multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.n, self.terms.iter().map(|(c, s)| (c * factor, s.clone())))
    }

    /// Sum of absolute coefficients; an upper bound on the spectral norm.
    pub fn one_norm(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    /// Hashable identity of the operator, exact in the coefficient bits.
    pub fn cache_key(&self) -> (usize, Vec<(u64, PauliString)>) {
        (self.n, self.terms.iter().map(|(c, s)| (c.to_bits(), s.clone())).collect())
    }
}

/// A Pauli-sum file: the operator plus an optional reference bitstring.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliFile {
    pub hamiltonian: PauliSum,
    pub reference: Option<String>,
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(k) => &line[..k],
        None => line,
    }
}

fn parse_ref_comment(line: &str) -> Option<&str> {
    let rest = line.trim().strip_prefix('#')?.trim_start();
    Some(rest.strip_prefix("ref:")?.trim())
}

fn parse_coefficient(token: &str, line: usize) -> Result<f64> {
    match token.parse::<f64>() {
        Ok(c) if c.is_finite() => Ok(c),
        Ok(_) => Err(Error::Parse { line, message: format!("non-finite coefficient {token:?}") }),
        Err(_) => {
            let lowered = token.to_ascii_lowercase();
            let message = if lowered.contains('i') || lowered.contains('j') || token.contains(',') {
                format!("non-real coefficient {token:?}")
            } else {
                format!("malformed coefficient {token:?}")
            };
            Err(Error::Parse { line, message })
        }
    }
}

/// Parses a Pauli-sum document, including any `# ref:` metadata line.
pub fn parse_pauli_file(text: &str) -> Result<PauliFile> {
    let mut n: Option<usize> = None;
    let mut reference: Option<String> = None;
    let mut terms = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        if let Some(bits) = parse_ref_comment(raw) {
            reference = Some(bits.to_string());
            continue;
        }
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let Some(n) = n else {
            let declared = line.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("expected qubit count, found {line:?}"),
            })?;
            if declared == 0 {
                return Err(Error::Parse { line: line_no, message: "qubit count must be positive".into() });
            }
            n = Some(declared);
            continue;
        };

        let mut tokens = line.split_whitespace();
        let (Some(coef), Some(string), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: line_no,
                message: "expected `<coefficient> <string>`".into(),
            });
        };
        let c = parse_coefficient(coef, line_no)?;
        let s: PauliString = string.parse().map_err(|e: Error| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if s.num_qubits() != n {
            return Err(Error::Parse {
                line: line_no,
                message: format!("string length {} does not match declared n = {n}", s.num_qubits()),
            });
        }
        terms.push((c, s));
    }

    let n = n.ok_or(Error::Parse { line: 0, message: "missing qubit count".into() })?;
    if let Some(bits) = &reference {
        if bits.len() != n || !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::Parse {
                line: 0,
                message: format!("reference {bits:?} is not a bitstring of length {n}"),
            });
        }
    }
    Ok(PauliFile { hamiltonian: PauliSum::new(n, terms)?, reference })
}

pub fn parse_pauli_sum(text: &str) -> Result<PauliSum> {
    parse_pauli_file(text).map(|f| f.hamiltonian)
}

/// Writes the canonical file form. Coefficients use the shortest decimal
/// that round-trips through `f64`.
pub fn write_pauli_sum(h: &PauliSum, reference: Option<&str>) -> String {
    let mut out = format!("{}\n", h.n);
    if let Some(bits) = reference {
        out.push_str(&format!("# ref: {bits}\n"));
    }
    for (c, s) in &h.terms {
        out.push_str(&format!("{c:?} {s}\n"));
    }
    out
}

/// Local fields of the disordered ring.
#[derive(Debug, Clone, PartialEq)]
pub enum Fields {
    Explicit(Vec<f64>),
    /// Drawn uniformly from the open interval `(-h, h)`.
    Seeded(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisorderSpec {
    pub coupling: f64,
    pub disorder: f64,
    pub fields: Fields,
}

impl DisorderSpec {
    /// Resolves the per-site fields for an `n`-site ring.
    ///
    /// Seeded fields come from ChaCha20 (`rand_chacha`, seeded through
    /// `SeedableRng::seed_from_u64`), one `Open01` variate `u` per site in
    /// site order, mapped to `h (2u - 1)`.
    pub fn resolve_fields(&self, n: usize) -> Result<Vec<f64>> {
        match &self.fields {
            Fields::Explicit(h) => {
                if h.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: h.len() });
                }
                Ok(h.clone())
            }
            Fields::Seeded(seed) => {
                if !(self.disorder > 0.0) {
                    return Err(Error::InvalidInput("disorder bound must be positive".into()));
                }
                let mut rng = ChaCha20Rng::seed_from_u64(*seed);
                Ok((0..n)
                    .map(|_| {
                        let u: f64 = Open01.sample(&mut rng);
                        self.disorder * (2.0 * u - 1.0)
                    })
                    .collect())
            }
        }
    }
}

/// Periodic Heisenberg ring `sum_i J s_i . s_{i+1} + h_i Z_i` with
/// `s_{n+1} = s_1`.
pub fn build_spin_ring(n: usize, spec: &DisorderSpec) -> Result<PauliSum> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("spin ring needs at least 3 sites, got {n}")));
    }
    let fields = spec.resolve_fields(n)?;
    let mut terms = Vec::with_capacity(4 * n);
    for i in 0..n {
        let j = (i + 1) % n;
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            terms.push((spec.coupling, PauliString::from_sparse(n, &[(i, p), (j, p)])?));
        }
    }
    for (i, &h) in fields.iter().enumerate() {
        terms.push((h, PauliString::from_sparse(n, &[(i, Pauli::Z)])?));
    }
    PauliSum::new(n, terms)
}

/// Ground configuration of `sum_i h_i Z_i`: bit `i` is set iff `h_i > 0`.
pub fn field_only_ground_bits(fields: &[f64]) -> String {
    fields.iter().map(|&h| if h > 0.0 { '1' } else { '0' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_term() {
        let h = parse_pauli_sum("2\n1.0 ZZ\n").unwrap();
        assert_eq!(h.num_qubits(), 2);
        assert_eq!(h.terms(), &[(1.0, "ZZ".parse().unwrap())]);
    }

    #[test]
    fn merges_duplicate_strings() {
        let h = parse_pauli_sum("2\n0.5 ZZ\n0.5 ZZ\n").unwrap();
        assert_eq!(h.terms(), &[(1.0, "ZZ".parse().unwrap())]);
    }

    #[test]
    fn cancelling_terms_are_dropped() {
        let h = parse_pauli_sum("1\n0.5 X\n-0.5 X\n1 Z\n").unwrap();
        assert_eq!(h.terms().len(), 1);
    }

    #[test]
    fn rejects_length_mismatch() {
        let err = parse_pauli_sum("2\n1.0 ZZZ\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn rejects_bad_letter_and_complex_coefficient() {
        assert!(parse_pauli_sum("2\n1.0 ZA\n").is_err());
        let err = parse_pauli_sum("2\n1+2i ZZ\n").unwrap_err();
        assert!(err.to_string().contains("non-real"), "{err}");
        assert!(parse_pauli_sum("2\n1.0\n").is_err());
        assert!(parse_pauli_sum("# nothing\n").is_err());
    }

    #[test]
    fn reads_reference_comment() {
        let f = parse_pauli_file("3\n# ref: 010\n1.0 ZZI # trailing\n").unwrap();
        assert_eq!(f.reference.as_deref(), Some("010"));
        assert!(parse_pauli_file("3\n# ref: 01\n1.0 ZZI\n").is_err());
    }

    #[test]
    fn canonical_file_round_trips() {
        let text = "3\n# ref: 101\n0.1 XXI\n-0.25 IYY\n1e-7 ZIZ\n";
        let f = parse_pauli_file(text).unwrap();
        let written = write_pauli_sum(&f.hamiltonian, f.reference.as_deref());
        assert_eq!(written, text);
    }

    #[test]
    fn ring_has_nine_couplings_for_three_sites() {
        let spec = DisorderSpec { coupling: 1.0, disorder: 1.0, fields: Fields::Explicit(vec![0.0; 3]) };
        let h = build_spin_ring(3, &spec).unwrap();
        assert_eq!(h.terms().len(), 9);
        assert!(h.terms().iter().all(|(c, _)| *c == 1.0));
    }

    #[test]
    fn zero_coupling_leaves_fields() {
        let spec = DisorderSpec { coupling: 0.0, disorder: 1.0, fields: Fields::Explicit(vec![0.3, -0.2, 0.1]) };
        let h = build_spin_ring(3, &spec).unwrap();
        let expect = PauliSum::new(
            3,
            vec![(0.3, "ZII".parse().unwrap()), (-0.2, "IZI".parse().unwrap()), (0.1, "IIZ".parse().unwrap())],
        )
        .unwrap();
        assert_eq!(h, expect);
    }

    #[test]
    fn two_site_ring_is_rejected() {
        let spec = DisorderSpec { coupling: 1.0, disorder: 1.0, fields: Fields::Seeded(1) };
        assert!(build_spin_ring(2, &spec).is_err());
    }

    #[test]
    fn seeded_fields_are_reproducible_and_bounded() {
        let spec = DisorderSpec { coupling: 0.1, disorder: 0.7, fields: Fields::Seeded(42) };
        let a = build_spin_ring(8, &spec).unwrap();
        let b = build_spin_ring(8, &spec).unwrap();
        assert_eq!(a, b);
        let h = spec.resolve_fields(8).unwrap();
        assert!(h.iter().all(|x| x.abs() < 0.7));
        let other = DisorderSpec { fields: Fields::Seeded(43), ..spec };
        assert_ne!(other.resolve_fields(8).unwrap(), h);
    }

    #[test]
    fn field_ground_bits() {
        assert_eq!(field_only_ground_bits(&[0.3, -0.2]), "10");
        assert_eq!(field_only_ground_bits(&[0.0, 0.0]), "00");
        assert_eq!(field_only_ground_bits(&[-1.0, -1.0, -1.0]), "000");
    }

    #[test]
    fn masks_follow_msb_convention() {
        let s: PauliString = "XIY".parse().unwrap();
        assert_eq!(s.masks(), (0b101, 0b001, 1));
    }
}
