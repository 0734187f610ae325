//! Compression of multiple Riordan arrays, and finite-depth positivity
//! certificates for the compressed blocks.
//!
//! A proper array over modulus `ell` is supported on the residue classes
//! `k mod ell`, column by column, so most of any finite block is structural
//! zeros. Compression removes them: entry `(n, k)` of the compressed array
//! is entry `(n*ell - (ell-1)*k, k)` of the source. The result is again a
//! lower-triangular array, and it is generated the same way the source was,
//! by the stride-compacted pair `(ghat; fhat_1, ..., fhat_ell)` read off the
//! source coefficients ([`compress_spec`]). Both descriptions are
//! implemented independently, [`compress`] by index sampling and
//! [`CompressedSpec::build`] by column generating functions, and the tests
//! hold them bit-identical.
//!
//! Square ("type") arrays compress by row sampling instead: every `ell`-th
//! row survives, which is all of them that are nonzero ([`compress_type`]).
//!
//! The compressed array inherits the sequence characterization of its
//! source with the stride removed. [`compressed_seq_check`] verifies this
//! two ways: as exact functional identities in the root of
//! `fhat_1 ... fhat_ell / t^(ell-1)` (only attempted when the leading
//! coefficient admits a rational `ell`-th root; otherwise skipped with a
//! notice), and as entrywise recurrences on a compressed block, which never
//! leave the rationals.
//!
//! Positivity: [`pf_check`] tests a coefficient sequence for the Pólya
//! frequency property by enumerating minors of its Toeplitz matrix, and
//! [`tp_check`] tests any block for total positivity the same way. Both are
//! exact and exhaustive up to the requested minor order, guarded by an
//! explicit budget on the number of minors.

use crate::matrix::RationalMatrix;
use crate::multiriordan::{
    compact_residue, expand_residue, MultiRiordanError, MultiRiordanSpec, SeqChar,
};
use crate::rational::{binomial, nth_root_exact, rat_to_string};
use crate::riordan::{RecurrenceViolation, RiordanKind};
use crate::series::{Series, SeriesError};
use crate::Rational;
use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CompressError {
    #[error("operation requires a {expected} spec, found {found}")]
    KindMismatch { expected: RiordanKind, found: RiordanKind },
    #[error("insufficient truncation: need order {needed}, have {available}")]
    InsufficientTruncation { needed: usize, available: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    MultiRiordan(#[from] MultiRiordanError),
}

/// The stride-compacted generators of a compressed array: `ghat` collects
/// every `ell`-th coefficient of the source `g`, and `fhat_i` every
/// `ell`-th coefficient of `f_i`, each shifted back onto valuation 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressedSpec {
    ell: usize,
    ghat: Series,
    fhat: Vec<Series>,
}

impl CompressedSpec {
    /// Assemble from components; `ghat` must be a unit and every `fhat_i`
    /// must vanish to order exactly 1, mirroring a proper source.
    pub fn new(ell: usize, ghat: Series, fhat: Vec<Series>) -> Result<Self, CompressError> {
        if ell < 2 {
            return Err(MultiRiordanError::EllTooSmall(ell).into());
        }
        if fhat.len() != ell {
            return Err(MultiRiordanError::MultiplierCountMismatch { ell, got: fhat.len() }.into());
        }
        if ghat.constant_term().is_zero() {
            return Err(MultiRiordanError::UnitConstantTermRequired.into());
        }
        for (index, fh) in fhat.iter().enumerate() {
            if fh.valuation() != Some(1) {
                return Err(MultiRiordanError::ImproperMultiplier { index }.into());
            }
        }
        Ok(CompressedSpec { ell, ghat, fhat })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn ghat(&self) -> &Series {
        &self.ghat
    }

    /// The `i`-th compacted multiplier, 0-based. Panics if `i >= ell`.
    pub fn fhat(&self, i: usize) -> &Series {
        &self.fhat[i]
    }

    pub fn fhats(&self) -> impl Iterator<Item = &Series> {
        self.fhat.iter()
    }

    /// The truncation order every component is good for.
    pub fn order(&self) -> usize {
        self.fhat.iter().map(|fh| fh.order()).fold(self.ghat.order(), usize::min)
    }

    /// Build the leading block from the column generating functions:
    /// column `k` carries `ghat * fhat_1 ... fhat_m * (fhat_1 ... fhat_ell)^q`
    /// where `k = q*ell + m`, i.e. the multipliers attach cyclically just as
    /// in the source array.
    pub fn build(&self, rows: usize, cols: usize) -> Result<RationalMatrix, CompressError> {
        let available = self.order();
        let needed = rows.saturating_sub(1);
        if needed > available {
            return Err(CompressError::InsufficientTruncation { needed, available });
        }
        let mut out = RationalMatrix::zeros(rows, cols);
        if rows == 0 || cols == 0 {
            return Ok(out);
        }
        let mut col = self.ghat.truncated(available);
        for k in 0..cols {
            for n in 0..rows {
                *out.entry_mut(n, k) = col.coeff(n)?.clone();
            }
            if k + 1 < cols {
                col = col.mul(&self.fhat[k % self.ell].truncated(available));
            }
        }
        Ok(out)
    }

    /// Undo the compaction: send `t` to `t^ell` in `ghat` and restore the
    /// valuation-1 grading on each multiplier. Recovers the source spec of
    /// [`compress_spec`] up to truncation order.
    pub fn expand(&self) -> Result<MultiRiordanSpec, CompressError> {
        let g = expand_residue(&self.ghat, self.ell);
        let mut f = Vec::with_capacity(self.ell);
        for fh in &self.fhat {
            let order = fh.order() * self.ell;
            let mut coeffs = vec![Rational::zero(); order + 1];
            for k in 1..=fh.order() {
                coeffs[(k - 1) * self.ell + 1] = fh.coeffs()[k].clone();
            }
            f.push(Series::from_coeffs(coeffs));
        }
        MultiRiordanSpec::proper(self.ell, g, f).map_err(Into::into)
    }
}

impl fmt::Display for CompressedSpec {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "compressed spec mod {}: ({}", self.ell, self.ghat)?;
        for fh in &self.fhat {
            write!(out, "; {}", fh)?;
        }
        out.write_str(")")
    }
}

impl serde::Serialize for CompressedSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut state = serializer.serialize_struct("CompressedSpec", 3)?;
        state.serialize_field("ell", &self.ell)?;
        state.serialize_field("ghat", &self.ghat)?;
        state.serialize_field("fhat", &self.fhat)?;
        state.end()
    }
}

/// Compress a proper array by index sampling: entry `(n, k)` of the result
/// is entry `(n*ell - (ell-1)*k, k)` of the source, and zero where that row
/// index would be negative.
pub fn compress(
    a: &MultiRiordanSpec,
    rows: usize,
    cols: usize,
) -> Result<RationalMatrix, CompressError> {
    require_kind(a, RiordanKind::Proper)?;
    let ell = a.ell();
    let needed = rows.saturating_sub(1) * ell;
    if needed > a.order() {
        return Err(CompressError::InsufficientTruncation { needed, available: a.order() });
    }
    let mut out = RationalMatrix::zeros(rows, cols);
    if rows == 0 || cols == 0 {
        return Ok(out);
    }
    let block = a.mbuild(needed + 1, cols)?;
    for n in 0..rows {
        for k in 0..cols {
            if n * ell >= (ell - 1) * k {
                *out.entry_mut(n, k) = block.entry(n * ell - (ell - 1) * k, k).clone();
            }
        }
    }
    Ok(out)
}

/// Read the compacted generators off a proper source.
pub fn compress_spec(a: &MultiRiordanSpec) -> Result<CompressedSpec, CompressError> {
    require_kind(a, RiordanKind::Proper)?;
    let ell = a.ell();
    let ghat = compact_residue(a.g(), ell, 0);
    let fhat = a
        .multipliers()
        .map(|fi| compact_residue(fi, ell, 1).mul_t_pow(1))
        .collect();
    Ok(CompressedSpec { ell, ghat, fhat })
}

/// Compress a square ("type") array: compact every component onto its
/// residue-0 support and rebuild, so that entry `(n, k)` of the result is
/// entry `(n*ell, k)` of the source. The rows in between are structural
/// zeros. Grading is enforced when the source spec is constructed, so the
/// compaction here cannot drop a nonzero coefficient.
pub fn compress_type(
    a: &MultiRiordanSpec,
    rows: usize,
    cols: usize,
) -> Result<RationalMatrix, CompressError> {
    require_kind(a, RiordanKind::Square)?;
    let ell = a.ell();
    let dhat = compact_residue(a.g(), ell, 0);
    let hhat: Vec<Series> = a.multipliers().map(|hi| compact_residue(hi, ell, 0)).collect();
    let available = hhat.iter().map(|h| h.order()).fold(dhat.order(), usize::min);
    let needed = (rows + cols).saturating_sub(2);
    if needed > available {
        return Err(CompressError::InsufficientTruncation { needed, available });
    }
    let mut out = RationalMatrix::zeros(rows, cols);
    if rows == 0 || cols == 0 {
        return Ok(out);
    }
    let mut col = dhat.truncated(available);
    for k in 0..cols {
        for n in 0..rows {
            *out.entry_mut(n, k) = col.coeff(n)?.clone();
        }
        if k + 1 < cols {
            col = col.mul(&hhat[k % ell].truncated(available));
        }
    }
    Ok(out)
}

/// Outcome of evaluating the compressed functional identities exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalIdentities {
    pub a_ok: bool,
    pub z_ok: Vec<bool>,
}

/// Sequence characterization of a compressed array, checked against the
/// source sequences.
///
/// `functional` is present when the root gate passed; `notice` explains a
/// skip. `a_rule` collects violations of the column recurrence
/// `dhat[n][k] = sum_j a_j dhat[n-ell+j(ell-1)][k+(j-1)ell]` for
/// `k >= ell`, and `z_rule` violations of
/// `dhat[n][m] = sum_j z_{m,j} dhat[n-1+j(ell-1)][m+j*ell]` for the residue
/// columns `m < ell` (the violation's `col` records `m`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressedSeqReport {
    pub depth: usize,
    pub functional: Option<FunctionalIdentities>,
    pub notice: Option<String>,
    pub a_rule: Vec<RecurrenceViolation>,
    pub z_rule: Vec<RecurrenceViolation>,
    seq: SeqChar,
}

impl CompressedSeqReport {
    /// The source sequences the checks were run against.
    pub fn seq(&self) -> &SeqChar {
        &self.seq
    }

    /// True when every check that ran came back clean.
    pub fn all_hold(&self) -> bool {
        self.a_rule.is_empty()
            && self.z_rule.is_empty()
            && self
                .functional
                .as_ref()
                .is_none_or(|f| f.a_ok && f.z_ok.iter().all(|&ok| ok))
    }
}

/// Check that the source's A and Z sequences characterize the compressed
/// array.
///
/// The functional identities evaluate both sides of
///
/// * `A(w) = fhat_1 ... fhat_ell / t^ell`,
/// * `Z_0(w) = (1 - g(0)/ghat) / t`,
/// * `Z_m(w) = (1 - g(0) f_{1,1} .. f_{m,1} t^m / (ghat fhat_1 .. fhat_m)) / t`,
///
/// where `w` is the `ell`-th root of `u = fhat_1 ... fhat_ell / t^(ell-1)`.
/// The sequences are supported on multiples of `ell`, so both sides only
/// ever see `w` through `w^ell = u` and the evaluation stays rational; the
/// root itself is demanded only of the leading coefficient, and when that
/// has no rational `ell`-th root the functional form is skipped with a
/// notice. The recurrences are checked entrywise in all cases.
pub fn compressed_seq_check(
    a: &MultiRiordanSpec,
    depth: usize,
) -> Result<CompressedSeqReport, CompressError> {
    require_kind(a, RiordanKind::Proper)?;
    let ell = a.ell();
    let seq = a.mseq()?;
    let chat = compress_spec(a)?;
    let avail = chat.order();

    let mut u = Series::one(avail);
    for fh in &chat.fhat {
        u = u.mul(&fh.truncated(avail));
    }
    let u = u.div(&Series::monomial(Rational::one(), ell - 1, avail))?;
    let lead = u.coeffs()[1].clone();

    let (functional, notice) = if nth_root_exact(&lead, ell as u32).is_some() {
        let g0 = a.g().constant_term().clone();
        let a_lhs = compact_residue(seq.a(), ell, 0).compose(&u)?;
        let a_rhs = u.div(&Series::t(u.order()))?;
        let a_ok = a_lhs.agrees_on_common_order(&a_rhs);
        let mut z_ok = Vec::with_capacity(ell);
        let mut den = chat.ghat.truncated(avail);
        let mut scale = g0;
        for m in 0..ell {
            if m > 0 {
                den = den.mul(&chat.fhat[m - 1].truncated(avail));
                scale = &scale * &chat.fhat[m - 1].coeffs()[1];
            }
            let frac = Series::monomial(scale.clone(), m, avail).div(&den)?;
            let rhs_order = frac.order();
            let rhs = Series::one(rhs_order)
                .sub(&frac)
                .div(&Series::t(rhs_order))?;
            let lhs = compact_residue(seq.z(m), ell, 0).compose(&u)?;
            z_ok.push(lhs.agrees_on_common_order(&rhs));
        }
        (Some(FunctionalIdentities { a_ok, z_ok }), None)
    } else {
        let notice = format!(
            "leading coefficient {} of the compacted multiplier product has no rational \
             {}-th root; functional identities skipped, recurrences checked only",
            rat_to_string(&lead),
            ell
        );
        (None, Some(notice))
    };

    let need_a = depth.saturating_sub(1 + ell) * ell;
    let need_z = depth.saturating_sub(2) * ell;
    if seq.a().order() < need_a || seq.z_all().iter().any(|z| z.order() < need_z) {
        let available =
            seq.z_all().iter().map(|z| z.order()).fold(seq.a().order(), usize::min);
        return Err(CompressError::InsufficientTruncation {
            needed: need_a.max(need_z),
            available,
        });
    }
    let dim = depth.max(depth.saturating_sub(2) * ell + 1);
    let block = chat.build(dim, dim)?;
    let mut a_rule = Vec::new();
    for k in ell..depth {
        for n in k..depth {
            let mut rhs = Rational::zero();
            for j in 0..=(n - k) {
                let row = n + j * (ell - 1) - ell;
                let col = k + j * ell - ell;
                rhs += seq.a_term(j)? * block.entry(row, col);
            }
            if *block.entry(n, k) != rhs {
                a_rule.push(RecurrenceViolation {
                    row: n,
                    col: k,
                    left: block.entry(n, k).clone(),
                    right: rhs,
                });
            }
        }
    }
    let mut z_rule = Vec::new();
    for m in 0..ell.min(depth) {
        for n in (m + 1)..depth {
            let mut rhs = Rational::zero();
            for j in 0..=(n - 1 - m) {
                let row = n - 1 + j * (ell - 1);
                let col = m + j * ell;
                rhs += seq.z_term(m, j)? * block.entry(row, col);
            }
            if *block.entry(n, m) != rhs {
                z_rule.push(RecurrenceViolation {
                    row: n,
                    col: m,
                    left: block.entry(n, m).clone(),
                    right: rhs,
                });
            }
        }
    }

    Ok(CompressedSeqReport { depth, functional, notice, a_rule, z_rule, seq })
}

fn require_kind(a: &MultiRiordanSpec, expected: RiordanKind) -> Result<(), CompressError> {
    if a.kind() == expected {
        Ok(())
    } else {
        Err(CompressError::KindMismatch { expected, found: a.kind() })
    }
}

/// Upper bound on minors enumerated by a single positivity check before it
/// refuses to run.
pub const DEFAULT_MINOR_BUDGET: u64 = 2_000_000;

/// A minor with a negative value, pinned by its exact row and column sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TPWitness {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TPVerdict {
    AllNonnegative,
    Violation(TPWitness),
    /// The requested enumeration was refused: it would evaluate `required`
    /// minors against a budget of `budget`.
    BudgetExceeded { required: BigInt, budget: u64 },
}

/// Result of an exhaustive minor enumeration. `block` is the side length of
/// the scanned block (the larger dimension when the input is not square).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TPReport {
    pub max_order: usize,
    pub block: usize,
    pub verdict: TPVerdict,
}

impl TPReport {
    pub fn is_all_nonnegative(&self) -> bool {
        matches!(self.verdict, TPVerdict::AllNonnegative)
    }

    pub fn witness(&self) -> Option<&TPWitness> {
        match &self.verdict {
            TPVerdict::Violation(w) => Some(w),
            _ => None,
        }
    }

    pub fn budget_exceeded(&self) -> bool {
        matches!(self.verdict, TPVerdict::BudgetExceeded { .. })
    }
}

impl serde::Serialize for TPReport {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        #[derive(serde::Serialize)]
        struct WitnessRepr<'a> {
            rows: &'a [usize],
            cols: &'a [usize],
            value: String,
        }
        let budgeted = matches!(self.verdict, TPVerdict::BudgetExceeded { .. });
        let mut state =
            serializer.serialize_struct("TPReport", if budgeted { 5 } else { 4 })?;
        state.serialize_field("order", &self.max_order)?;
        state.serialize_field("block", &self.block)?;
        state.serialize_field("ok", &self.is_all_nonnegative())?;
        match &self.verdict {
            TPVerdict::Violation(w) => state.serialize_field(
                "witness",
                &Some(WitnessRepr {
                    rows: &w.rows,
                    cols: &w.cols,
                    value: rat_to_string(&w.value),
                }),
            )?,
            _ => state.serialize_field("witness", &None::<WitnessRepr>)?,
        }
        if let TPVerdict::BudgetExceeded { required, budget } = &self.verdict {
            #[derive(serde::Serialize)]
            struct BudgetRepr {
                required: String,
                limit: u64,
            }
            state.serialize_field(
                "budget",
                &BudgetRepr { required: required.to_string(), limit: *budget },
            )?;
        }
        state.end()
    }
}

/// Total positivity of a finite block: evaluate every minor of order 1
/// through `max_order` exactly, in ascending order and lexicographic index
/// sets, and report the first negative one. Refuses blocks whose minor
/// count exceeds [`DEFAULT_MINOR_BUDGET`].
pub fn tp_check(matrix: &RationalMatrix, max_order: usize) -> TPReport {
    tp_check_with_budget(matrix, max_order, DEFAULT_MINOR_BUDGET)
}

/// [`tp_check`] with an explicit minor budget.
pub fn tp_check_with_budget(
    matrix: &RationalMatrix,
    max_order: usize,
    budget: u64,
) -> TPReport {
    let (r_n, c_n) = (matrix.rows(), matrix.cols());
    let block = r_n.max(c_n);
    let m = max_order.min(r_n).min(c_n);
    let required = minor_count(r_n, c_n, m);
    if required > BigInt::from(budget) {
        return TPReport {
            max_order,
            block,
            verdict: TPVerdict::BudgetExceeded { required, budget },
        };
    }
    for r in 1..=m {
        for rows in (0..r_n).combinations(r) {
            for cols in (0..c_n).combinations(r) {
                let value = matrix.minor(&rows, &cols);
                if value.is_negative() {
                    return TPReport {
                        max_order,
                        block,
                        verdict: TPVerdict::Violation(TPWitness { rows, cols, value }),
                    };
                }
            }
        }
    }
    TPReport { max_order, block, verdict: TPVerdict::AllNonnegative }
}

/// Pólya frequency test for a coefficient sequence: embed it in an
/// `terms x terms` lower-triangular Toeplitz block (entry `(i, j)` holds
/// term `i - j`, zero past the end of the sequence) and run [`tp_check`]
/// up to minor order `depth`.
pub fn pf_check(seq: &[Rational], depth: usize, terms: usize) -> TPReport {
    let toeplitz = RationalMatrix::from_fn(terms, terms, |i, j| {
        if i >= j && i - j < seq.len() {
            seq[i - j].clone()
        } else {
            Rational::zero()
        }
    });
    tp_check(&toeplitz, depth)
}

fn minor_count(rows: usize, cols: usize, max_order: usize) -> BigInt {
    let (r_big, c_big) = (BigInt::from(rows), BigInt::from(cols));
    let mut total = BigInt::zero();
    for r in 1..=max_order {
        total += binomial(&r_big, r) * binomial(&c_big, r);
    }
    total
}
