//! C ABI over the diversity-bound toolkit: opaque channel and code
//! handles, status codes, and plain-argument wrappers around the bound
//! computations, so MATLAB/Python/C callers can query the same numbers the
//! simulator uses.
//!
//! All functions are panic-free for any pointer-valid input: invalid
//! parameters surface as status codes. Every `*_new` has a matching
//! `*_free`; passing NULL to a `*_free` is a no-op.

use std::os::raw::c_char;

use ssafsim::bounds::{
    build_matryoshka, code_diversity_oracle, delta_closed_form, delta_max_generic,
    delta_multi_precoder, delta_unequal_m, max_full_diversity_rate, BinaryLinearCode, BoundConfig,
    BoundsError, MatryoshkaChannel, PrecodingStrategy,
};
use ssafsim::rational::Rational;

/// Status of an FFI call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SsafsimStatus {
    Ok = 0,
    /// A parameter violates a documented precondition.
    InvalidArgument = 1,
    /// An exhaustive-enumeration cap was exceeded.
    CapExceeded = 2,
    /// A required pointer was NULL.
    NullPointer = 3,
}

/// Precoding strategy selector.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SsafsimStrategy {
    None = 0,
    Single = 1,
    Multi = 2,
}

impl From<SsafsimStrategy> for PrecodingStrategy {
    fn from(s: SsafsimStrategy) -> Self {
        match s {
            SsafsimStrategy::None => PrecodingStrategy::None,
            SsafsimStrategy::Single => PrecodingStrategy::SinglePrecoder,
            SsafsimStrategy::Multi => PrecodingStrategy::MultiPrecoder,
        }
    }
}

/// Opaque nested block-fading channel.
pub struct SsafsimMatryoshka {
    inner: MatryoshkaChannel,
}

/// Opaque binary linear code.
pub struct SsafsimCode {
    inner: BinaryLinearCode,
}

fn status_of(err: &BoundsError) -> SsafsimStatus {
    match err {
        BoundsError::EnumerationCap { .. } => SsafsimStatus::CapExceeded,
        _ => SsafsimStatus::InvalidArgument,
    }
}

fn rational(num: i64, den: i64) -> Result<Rational, SsafsimStatus> {
    Rational::new(num, den).map_err(|_| SsafsimStatus::InvalidArgument)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ssafsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Build a nested channel from `num_blocks` diversity orders and block
/// lengths. On success writes a handle to `out`; free it with
/// `ssafsim_matryoshka_free`.
///
/// # Safety
/// `diversities` and `lengths` must point to `num_blocks` readable
/// elements; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ssafsim_matryoshka_new(
    diversities: *const u32,
    lengths: *const u64,
    num_blocks: usize,
    out: *mut *mut SsafsimMatryoshka,
) -> SsafsimStatus {
    if diversities.is_null() || lengths.is_null() || out.is_null() {
        return SsafsimStatus::NullPointer;
    }
    let d = std::slice::from_raw_parts(diversities, num_blocks).to_vec();
    let l = std::slice::from_raw_parts(lengths, num_blocks).to_vec();
    match MatryoshkaChannel::new(d, l) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(SsafsimMatryoshka { inner }));
            SsafsimStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Equivalent channel of a (beta, alpha, s, strategy) configuration for an
/// `n`-bit codeword, with equal per-slot spectral efficiencies.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ssafsim_build_matryoshka(
    beta: u32,
    alpha: u32,
    s: u32,
    strategy: SsafsimStrategy,
    n: u64,
    out: *mut *mut SsafsimMatryoshka,
) -> SsafsimStatus {
    if out.is_null() {
        return SsafsimStatus::NullPointer;
    }
    let cfg = BoundConfig {
        beta,
        alpha,
        s,
        rc: Rational::new(1, 2).expect("static rational"),
        slot_plan: None,
        strategy: strategy.into(),
    };
    match build_matryoshka(&cfg, n) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(SsafsimMatryoshka { inner }));
            SsafsimStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// # Safety
/// `ch` must be a live handle from this library, or NULL.
#[no_mangle]
pub unsafe extern "C" fn ssafsim_matryoshka_free(ch: *mut SsafsimMatryoshka) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

/// Number of blocks, or 0 for NULL.
///
/// # Safety
/// `ch` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn ssafsim_matryoshka_num_blocks(ch: *const SsafsimMatryoshka) -> usize {
    ch.as_ref().map_or(0, |c| c.inner.num_blocks())
}

/// Copy the per-block diversities and lengths into caller arrays of
/// `ssafsim_matryoshka_num_blocks` elements.
///
/// # Safety
/// `ch` must be a live handle; both output arrays must have room for
/// `ssafsim_matryoshka_num_blocks(ch)` elements.
#[no_mangle]
pub unsafe extern "C" fn ssafsim_matryoshka_get(
    ch: *const SsafsimMatryoshka,
    diversities: *mut u32,
    lengths: *mut u64,
) -> SsafsimStatus {
    let Some(c) = ch.as_ref() else {
        return SsafsimStatus::NullPointer;
    };
    if diversities.is_null() || lengths.is_null() {
        return SsafsimStatus::NullPointer;
    }
    let n = c.inner.num_blocks();
    std::slice::from_raw_parts_mut(diversities, n).copy_from_slice(c.inner.diversities());
    std::slice::from_raw_parts_mut(lengths, n).copy_from_slice(c.inner.lengths());
    SsafsimStatus::Ok
}

/// Generic diversity bound of a rate `rc_num/rc_den` code over `ch`.
///
/// # Safety
/// `ch` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ssafsim_delta_max_generic(
    ch: *const SsafsimMatryoshka,
    rc_num: i64,
    rc_den: i64,
    out: *mut u32,
) -> SsafsimStatus {
    let Some(c) = ch.as_ref() else {
        return SsafsimStatus::NullPointer;
    };
    if out.is_null() {
        return SsafsimStatus::NullPointer;
    }
    let rc = match rational(rc_num, rc_den) {
        Ok(r) => r,
        Err(s) => return s,
    };
    match delta_max_generic(&c.inner, rc) {
        Ok(d) => {
            *out = d;
            SsafsimStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Closed-form bound `min(s + floor((beta+1+alpha)(1-Rc)), beta+1)`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ssafsim_delta_closed_form(
    beta: u32,
    alpha: u32,
    s: u32,
    rc_num: i64,
    rc_den: i64,
    out: *mut u32,
) -> SsafsimStatus {
    if out.is_null() {
        return SsafsimStatus::NullPointer;
    }
    let rc = match rational(rc_num, rc_den) {
        Ok(r) => r,
        Err(st) => return st,
    };
    match delta_closed_form(beta, alpha, s, rc) {
        Ok(d) => {
            *out = d;
            SsafsimStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Multi-precoder bound (requires `s` dividing `beta + 1`).
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ssafsim_delta_multi_precoder(
    beta: u32,
    s: u32,
    rc_num: i64,
    rc_den: i64,
    out: *mut u32,
) -> SsafsimStatus {
    if out.is_null() {
        return SsafsimStatus::NullPointer;
    }
    let rc = match rational(rc_num, rc_den) {
        Ok(r) => r,
        Err(st) => return st,
    };
    match delta_multi_precoder(beta, s, rc) {
        Ok(d) => {
            *out = d;
            SsafsimStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Unequal-spectral-efficiency bound for `beta + 1` slot bit loads `m`.
///
/// # Safety
/// `m` must point to `m_len` readable elements; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ssafsim_delta_unequal_m(
    beta: u32,
    s: u32,
    m: *const u32,
    m_len: usize,
    rc_num: i64,
    rc_den: i64,
    out: *mut u32,
) -> SsafsimStatus {
    if m.is_null() || out.is_null() {
        return SsafsimStatus::NullPointer;
    }
    let rc = match rational(rc_num, rc_den) {
        Ok(r) => r,
        Err(st) => return st,
    };
    let slots = std::slice::from_raw_parts(m, m_len);
    match delta_unequal_m(beta, s, slots, rc) {
        Ok(d) => {
            *out = d;
            SsafsimStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Largest full-diversity coding rate `(s + alpha)/(beta + 1 + alpha)`,
/// capped at 1, returned as an exact fraction.
///
/// # Safety
/// `out_num` and `out_den` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ssafsim_max_full_diversity_rate(
    beta: u32,
    alpha: u32,
    s: u32,
    out_num: *mut i64,
    out_den: *mut i64,
) -> SsafsimStatus {
    if out_num.is_null() || out_den.is_null() {
        return SsafsimStatus::NullPointer;
    }
    if beta == 0 || s == 0 {
        return SsafsimStatus::InvalidArgument;
    }
    let r = max_full_diversity_rate(beta, alpha, s);
    *out_num = r.num();
    *out_den = r.den();
    SsafsimStatus::Ok
}

/// Build a systematic code `[I | P]` from the row-major `k x (n - k)`
/// parity bit matrix (entries 0/1). Free with `ssafsim_code_free`.
///
/// # Safety
/// `parity` must point to `k * (n - k)` readable bytes; `out` must be
/// valid.
#[no_mangle]
pub unsafe extern "C" fn ssafsim_code_new_systematic(
    parity: *const u8,
    k: usize,
    n: usize,
    out: *mut *mut SsafsimCode,
) -> SsafsimStatus {
    if parity.is_null() || out.is_null() {
        return SsafsimStatus::NullPointer;
    }
    if n <= k || k == 0 {
        return SsafsimStatus::InvalidArgument;
    }
    let p = std::slice::from_raw_parts(parity, k * (n - k));
    let rows: Vec<Vec<u8>> = p.chunks(n - k).map(<[u8]>::to_vec).collect();
    match BinaryLinearCode::systematic(&rows) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(SsafsimCode { inner }));
            SsafsimStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// # Safety
/// `code` must be a live handle from this library, or NULL.
#[no_mangle]
pub unsafe extern "C" fn ssafsim_code_free(code: *mut SsafsimCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Exact code diversity on a nested channel by exhaustive codeword
/// enumeration (dimension capped at 20).
///
/// # Safety
/// `code` and `ch` must be live handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ssafsim_code_diversity_oracle(
    code: *const SsafsimCode,
    ch: *const SsafsimMatryoshka,
    out: *mut u32,
) -> SsafsimStatus {
    let (Some(code), Some(ch)) = (code.as_ref(), ch.as_ref()) else {
        return SsafsimStatus::NullPointer;
    };
    if out.is_null() {
        return SsafsimStatus::NullPointer;
    }
    match code_diversity_oracle(&code.inner, &ch.inner) {
        Ok(d) => {
            *out = d;
            SsafsimStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}
