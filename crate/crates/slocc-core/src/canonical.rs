//! The complete class label: assembly, canonical encoding, comparison, and
//! serialization, plus the top-level classify and equivalence operations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{GaussRat, Matrix};
use crate::jordan::{
    denormalized_eigenvalues, jordan_form, jordan_matrix, moebius_canonicalize_with_map, Moebius,
    SegreSymbol,
};
use crate::pencil::{generic_rank, PencilSignature, ProjectivePoint};
use crate::reduction::{assemble_block_pair, normalize_leading, reduce_invariants, DeficiencyInfo};
use crate::state::{is_genuine, transpose_orient, trim, MatrixPair};

/// The full canonical class label of a state. Two labels are equal iff their
/// encodings are byte-equal.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    /// Dimensions after the orientation convention (rows <= cols).
    pub m: usize,
    pub n: usize,
    /// Dimensions after trimming to the supporting subspaces.
    pub m_trim: usize,
    pub n_trim: usize,
    pub genuine: bool,
    pub signature: PencilSignature,
    /// Descending column-compression ranks of the rectangular part.
    pub staircase: Vec<usize>,
    pub deficiency: DeficiencyInfo,
    /// Moebius-normalized eigenvalue structure of the square part.
    pub segre: SegreSymbol,
    /// Canonical byte string; a pure function of the other fields.
    pub encoding: String,
}

impl PartialEq for CanonicalForm {
    fn eq(&self, other: &Self) -> bool {
        self.encoding == other.encoding
    }
}

impl Eq for CanonicalForm {}

pub(crate) fn encode_fields(
    m: usize,
    n: usize,
    m_trim: usize,
    n_trim: usize,
    genuine: bool,
    sig: &PencilSignature,
    staircase: &[usize],
    deficiency: &DeficiencyInfo,
    segre: &SegreSymbol,
) -> String {
    let st: Vec<String> = staircase.iter().map(|s| s.to_string()).collect();
    let lp: Vec<String> = deficiency
        .left_profile
        .iter()
        .map(|s| s.to_string())
        .collect();
    format!(
        "cf1|{m}x{n}|trim={m_trim}x{n_trim}|g={}|sig=({},{})|st=[{}]|df={}:[{}]:{}:{}|sg={}",
        if genuine { 1 } else { 0 },
        sig.n,
        sig.l,
        st.join(","),
        deficiency.zero_rows,
        lp.join(","),
        flag_str(deficiency.c_case),
        flag_str(deficiency.r_case),
        segre.render(),
    )
}

fn flag_str(f: crate::reduction::CaseFlag) -> &'static str {
    match f {
        crate::reduction::CaseFlag::Zero => "zero",
        crate::reduction::CaseFlag::Nonzero => "nonzero",
    }
}

impl CanonicalForm {
    /// Rebuilds the encoding from the structured fields.
    pub fn recompute_encoding(&self) -> String {
        encode_fields(
            self.m,
            self.n,
            self.m_trim,
            self.n_trim,
            self.genuine,
            &self.signature,
            &self.staircase,
            &self.deficiency,
            &self.segre,
        )
    }
}

/// Outcome of the classification pipeline including the data needed by the
/// verification oracles.
pub struct ClassifyDetail {
    pub form: CanonicalForm,
    /// Pre-normalization Segre symbol in pencil points.
    pub raw_segre: SegreSymbol,
    /// The Moebius map carrying the raw symbol onto the canonical one.
    pub moebius: Moebius,
}

/// Classifies a state: orientation, trimming, leading-rank normalization,
/// staircase/deficiency reduction, Jordan form, Moebius normalization.
pub fn classify(s: &MatrixPair) -> Result<CanonicalForm> {
    classify_detail(s).map(|d| d.form)
}

pub fn classify_detail(s: &MatrixPair) -> Result<ClassifyDetail> {
    let (oriented, _) = transpose_orient(s);
    let genuine = is_genuine(&oriented);
    let trimmed = trim(&oriented);
    let (pair, _) = transpose_orient(&trimmed.pair);
    let m = oriented.rows();
    let n = oriented.cols();
    let m_trim = pair.rows();
    let n_trim = pair.cols();

    if m_trim == 0 || n_trim == 0 {
        let sig = PencilSignature { n: 0, l: 0 };
        let deficiency = DeficiencyInfo::none();
        let segre = SegreSymbol::empty();
        let encoding = encode_fields(m, n, m_trim, n_trim, false, &sig, &[], &deficiency, &segre);
        return Ok(ClassifyDetail {
            form: CanonicalForm {
                m,
                n,
                m_trim,
                n_trim,
                genuine: false,
                signature: sig,
                staircase: Vec::new(),
                deficiency,
                segre: SegreSymbol::empty(),
                encoding,
            },
            raw_segre: SegreSymbol::empty(),
            moebius: Moebius::identity(),
        });
    }

    let (rank, witness) = generic_rank(&pair);
    let (normalized, _) = normalize_leading(&pair, &witness);
    let data = reduce_invariants(&normalized, rank)?;
    let (matrix_symbol, _) = jordan_form(&data.square_block)?;

    // Matrix eigenvalues to pencil points.
    let raw_segre = SegreSymbol::new(
        matrix_symbol
            .entries
            .iter()
            .map(|(p, blocks)| {
                let ProjectivePoint::Finite(mu) = p else {
                    unreachable!("matrix symbol has finite points")
                };
                (
                    crate::jordan::pencil_point_of_eigenvalue(mu),
                    blocks.clone(),
                )
            })
            .collect(),
    );
    let (segre, moebius) = moebius_canonicalize_with_map(&raw_segre);

    let mut staircase = data.staircase.clone();
    staircase.sort_unstable_by(|a, b| b.cmp(a));
    let deficiency = DeficiencyInfo::from_profile(data.left_profile.clone(), &staircase);
    let max_drop = segre.max_block_count();
    let signature = PencilSignature {
        n: rank,
        l: rank - max_drop.min(rank),
    };
    let encoding = encode_fields(
        m,
        n,
        m_trim,
        n_trim,
        genuine,
        &signature,
        &staircase,
        &deficiency,
        &segre,
    );
    Ok(ClassifyDetail {
        form: CanonicalForm {
            m,
            n,
            m_trim,
            n_trim,
            genuine,
            signature,
            staircase,
            deficiency,
            segre,
            encoding,
        },
        raw_segre,
        moebius,
    })
}

/// True iff the two states have identical canonical forms.
pub fn equivalent(a: &MatrixPair, b: &MatrixPair) -> Result<bool> {
    Ok(classify(a)? == classify(b)?)
}

/// Rebuilds the literal canonical matrix pair of a classified state: the
/// Jordan block realizes the normalized symbol under the deterministic
/// eigenvalue assignment, surrounded by the chain structure.
pub fn instantiate_form(cf: &CanonicalForm) -> MatrixPair {
    let eigen = denormalized_eigenvalues(&cf.segre);
    let square = jordan_matrix(&eigen);
    assemble_block_pair(&square, &cf.staircase, &cf.deficiency.left_profile)
}

// ---------------------------------------------------------------------------
// Wire format

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeficiencyWire {
    zero_rows: usize,
    left_profile: Vec<usize>,
    c_case: String,
    r_case: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormWire {
    m: usize,
    n: usize,
    m_trim: usize,
    n_trim: usize,
    genuine: bool,
    sig: [usize; 2],
    staircase: Vec<usize>,
    deficiency: DeficiencyWire,
    segre: Vec<(String, Vec<usize>)>,
    encoding: String,
}

fn point_to_string(p: &ProjectivePoint) -> String {
    p.render()
}

/// Parses "inf" or a scalar rendered by the field's display form:
/// "a/b", "c/di", or "a/b+c/di" with signs.
pub fn point_from_string(s: &str) -> Result<ProjectivePoint> {
    if s == "inf" {
        return Ok(ProjectivePoint::Infinity);
    }
    let bad = || Error::MalformedInput(format!("invalid point {s:?}"));
    let body = s.trim();
    if body.is_empty() {
        return Err(bad());
    }
    if let Some(imag) = body.strip_suffix('i') {
        // locate a sign that separates re from im (not leading, after a digit)
        let bytes = imag.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && bytes[k - 1].is_ascii_digit() {
                split = Some(k);
                break;
            }
        }
        let (re_s, im_s) = match split {
            Some(k) => (&imag[..k], &imag[k..]),
            None => ("0", imag),
        };
        let im_s = im_s.strip_prefix('+').unwrap_or(im_s);
        let g = GaussRat::from_strings(re_s, im_s)?;
        Ok(ProjectivePoint::Finite(g))
    } else {
        let g = GaussRat::from_strings(body, "0")?;
        Ok(ProjectivePoint::Finite(g))
    }
}

/// JSON rendering of a canonical form.
pub fn render(cf: &CanonicalForm) -> Vec<u8> {
    let wire = FormWire {
        m: cf.m,
        n: cf.n,
        m_trim: cf.m_trim,
        n_trim: cf.n_trim,
        genuine: cf.genuine,
        sig: [cf.signature.n, cf.signature.l],
        staircase: cf.staircase.clone(),
        deficiency: DeficiencyWire {
            zero_rows: cf.deficiency.zero_rows,
            left_profile: cf.deficiency.left_profile.clone(),
            c_case: flag_str(cf.deficiency.c_case).to_string(),
            r_case: flag_str(cf.deficiency.r_case).to_string(),
        },
        segre: cf
            .segre
            .entries
            .iter()
            .map(|(p, b)| (point_to_string(p), b.clone()))
            .collect(),
        encoding: cf.encoding.clone(),
    };
    serde_json::to_vec_pretty(&wire).expect("canonical form serialization cannot fail")
}

/// Parses a canonical form document, revalidating the encoding.
pub fn parse_cf(bytes: &[u8]) -> Result<CanonicalForm> {
    let wire: FormWire =
        serde_json::from_slice(bytes).map_err(|e| Error::MalformedInput(e.to_string()))?;
    let flag = |s: &str| -> Result<crate::reduction::CaseFlag> {
        match s {
            "zero" => Ok(crate::reduction::CaseFlag::Zero),
            "nonzero" => Ok(crate::reduction::CaseFlag::Nonzero),
            other => Err(Error::MalformedInput(format!("bad case flag {other:?}"))),
        }
    };
    let segre = SegreSymbol::new(
        wire.segre
            .iter()
            .map(|(p, b)| Ok((point_from_string(p)?, b.clone())))
            .collect::<Result<Vec<_>>>()?,
    );
    let cf = CanonicalForm {
        m: wire.m,
        n: wire.n,
        m_trim: wire.m_trim,
        n_trim: wire.n_trim,
        genuine: wire.genuine,
        signature: PencilSignature {
            n: wire.sig[0],
            l: wire.sig[1],
        },
        staircase: wire.staircase,
        deficiency: DeficiencyInfo {
            zero_rows: wire.deficiency.zero_rows,
            left_profile: wire.deficiency.left_profile,
            c_case: flag(&wire.deficiency.c_case)?,
            r_case: flag(&wire.deficiency.r_case)?,
        },
        segre,
        encoding: wire.encoding,
    };
    if cf.recompute_encoding() != cf.encoding {
        return Err(Error::MalformedInput(
            "encoding does not match the structured fields".into(),
        ));
    }
    Ok(cf)
}

/// Test and fixture helper: classify of a literal integer pair.
pub fn classify_ints(g1: &[&[i64]], g2: &[&[i64]]) -> Result<CanonicalForm> {
    let pair = MatrixPair::new(Matrix::from_ints(g1), Matrix::from_ints(g2))?;
    classify(&pair)
}
