//! C ABI for `spherecode`.
//!
//! Objects are opaque handles created by `*_new`/`*_load` functions and
//! released with the matching `*_free`. Every fallible call returns an
//! [`ScStatus`]; on failure `sc_last_error` copies a message for the calling
//! thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_bigint::BigUint;
use spherecode::constellation::Pam;
use spherecode::demap::SoftWord;
use spherecode::fec::{bp_decode, load_alist, ParityCheck};
use spherecode::shellcode::ShellCode;
use spherecode::sim::{DemapContext, Demapper};
use spherecode::{presets, Error};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    EmptyCode = 3,
    BudgetExceeded = 4,
    Parse = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Soft demapping methods.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScDemapper {
    Exact = 0,
    SymbolBySymbol = 1,
    OrbitFrozen = 2,
    Bcjr = 3,
}

/// Opaque shell or permutation code.
pub struct ScCode {
    code: ShellCode,
}

/// Opaque LDPC parity-check matrix.
pub struct ScLdpc {
    pc: ParityCheck,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> ScStatus {
    match e {
        Error::EmptyCode { .. } => ScStatus::EmptyCode,
        Error::BudgetExceeded { .. } => ScStatus::BudgetExceeded,
        Error::Parse { .. } => ScStatus::Parse,
        Error::Io(_) => ScStatus::Io,
        _ => ScStatus::InvalidArgument,
    }
}

struct Fail(ScStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(ScStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ScStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ScStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            ScStatus::Panic
        }
    }
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Fail(ScStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn code_ref<'a>(code: *const ScCode) -> Result<&'a ShellCode, Fail> {
    code.as_ref().map(|c| &c.code).ok_or_else(|| null("code"))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Copies the calling thread's last error message, NUL-terminated and
/// truncated to `len` bytes. Returns the full message length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn sc_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Builds the maximal `k`-class partial `(n, energy, p)` shell code, or the
/// complete shell when `k` is 0.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_code_new_shell(n: usize, energy: u64, p: usize, k: usize, out: *mut *mut ScCode) -> ScStatus {
    guard(|| {
        let pam = Pam::new(p)?;
        let code = if k == 0 {
            ShellCode::complete(n, energy, &pam)?
        } else {
            ShellCode::partial(n, energy, &pam, k)?
        };
        write_out(out, ScCode { code })
    })
}

/// Builds a named preset such as `"n12code2"`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_code_new_preset(name: *const c_char, out: *mut *mut ScCode) -> ScStatus {
    guard(|| {
        let code = presets::code(c_str(name, "name")?)?;
        write_out(out, ScCode { code })
    })
}

/// # Safety
/// `code` must be null or a handle from `sc_code_new_*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sc_code_free(code: *mut ScCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Block length, or 0 for a null handle.
///
/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sc_code_length(code: *const ScCode) -> usize {
    code.as_ref().map_or(0, |c| c.code.n())
}

/// `log2` of the number of unsigned codewords.
///
/// # Safety
/// `code` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_code_size_log2(code: *const ScCode, out: *mut f64) -> ScStatus {
    guard(|| {
        let c = code_ref(code)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = spherecode::numeric::log2_big(c.size());
        Ok(())
    })
}

/// Writes the amplitudes of the codeword with decimal index `index` into
/// `amplitudes[0..len]`; `len` must equal the block length.
///
/// # Safety
/// `index` must be a NUL-terminated string and `amplitudes` point to `len`
/// writable values.
#[no_mangle]
pub unsafe extern "C" fn sc_code_encode(
    code: *const ScCode,
    index: *const c_char,
    amplitudes: *mut u32,
    len: usize,
) -> ScStatus {
    guard(|| {
        let c = code_ref(code)?;
        let s = c_str(index, "index")?;
        let q: BigUint = s
            .parse()
            .map_err(|_| Fail(ScStatus::InvalidArgument, format!("bad index `{s}`")))?;
        if amplitudes.is_null() {
            return Err(null("amplitudes"));
        }
        if len != c.n() {
            return Err(Fail(ScStatus::BufferTooSmall, format!("need {} amplitudes, got {len}", c.n())));
        }
        let a = c.encode_amplitudes(&q)?;
        ptr::copy_nonoverlapping(a.as_ptr(), amplitudes, len);
        Ok(())
    })
}

/// Writes the decimal index of a codeword into `buf` (NUL-terminated).
///
/// # Safety
/// `amplitudes` must point to `len` values and `buf` to `buf_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn sc_code_decode(
    code: *const ScCode,
    amplitudes: *const u32,
    len: usize,
    buf: *mut c_char,
    buf_len: usize,
) -> ScStatus {
    guard(|| {
        let c = code_ref(code)?;
        if amplitudes.is_null() || buf.is_null() {
            return Err(null("amplitudes or buf"));
        }
        let a = std::slice::from_raw_parts(amplitudes, len);
        let text = c.decode_amplitudes(a)?.to_string();
        if text.len() + 1 > buf_len {
            return Err(Fail(ScStatus::BufferTooSmall, format!("index needs {} bytes", text.len() + 1)));
        }
        ptr::copy_nonoverlapping(text.as_ptr().cast::<c_char>(), buf, text.len());
        *buf.add(text.len()) = 0;
        Ok(())
    })
}

/// Label-bit LLRs of one received word. `llr` receives `n · bits_per_symbol`
/// values, per symbol the sign bit first; positive favours bit 0.
///
/// # Safety
/// `y` must point to `n` values and `llr` to `llr_len` writable values.
#[no_mangle]
pub unsafe extern "C" fn sc_llr(
    code: *const ScCode,
    method: ScDemapper,
    y: *const f64,
    n: usize,
    sigma: f64,
    llr: *mut f64,
    llr_len: usize,
) -> ScStatus {
    guard(|| {
        let c = code_ref(code)?;
        if y.is_null() || llr.is_null() {
            return Err(null("y or llr"));
        }
        let need = c.n() * c.pam().bits_per_symbol();
        if llr_len < need {
            return Err(Fail(ScStatus::BufferTooSmall, format!("need {need} LLR slots, got {llr_len}")));
        }
        let d = match method {
            ScDemapper::Exact => Demapper::Exact,
            ScDemapper::SymbolBySymbol => Demapper::SymbolBySymbol,
            ScDemapper::OrbitFrozen => Demapper::OrbitFrozen,
            ScDemapper::Bcjr => Demapper::Bcjr,
        };
        let sw = SoftWord::new(std::slice::from_raw_parts(y, n).to_vec(), sigma)?;
        let out = DemapContext::new(c, None, &[d])?.llr(d, &sw)?;
        ptr::copy_nonoverlapping(out.llr.as_ptr(), llr, need);
        Ok(())
    })
}

/// Loads a parity-check matrix in alist format.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_ldpc_load(path: *const c_char, out: *mut *mut ScLdpc) -> ScStatus {
    guard(|| {
        let pc = load_alist(c_str(path, "path")?)?;
        write_out(out, ScLdpc { pc })
    })
}

/// # Safety
/// `h` must be null or a handle from `sc_ldpc_load` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sc_ldpc_free(h: *mut ScLdpc) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Code length, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sc_ldpc_length(h: *const ScLdpc) -> usize {
    h.as_ref().map_or(0, |h| h.pc.n())
}

/// Sum-product decoding. `bits` receives `n` hard decisions (0 or 1);
/// `converged` is set to 1 when the syndrome is satisfied.
///
/// # Safety
/// `llr` must point to `n` values, `bits` to `n` writable bytes and
/// `converged` be valid.
#[no_mangle]
pub unsafe extern "C" fn sc_ldpc_decode(
    h: *const ScLdpc,
    llr: *const f64,
    n: usize,
    max_iter: usize,
    bits: *mut u8,
    converged: *mut i32,
) -> ScStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("decoder"))?;
        if llr.is_null() || bits.is_null() || converged.is_null() {
            return Err(null("llr, bits or converged"));
        }
        let out = bp_decode(&h.pc, std::slice::from_raw_parts(llr, n), max_iter)?;
        for (i, &b) in out.bits.iter().enumerate() {
            *bits.add(i) = b as u8;
        }
        *converged = out.converged as i32;
        Ok(())
    })
}
