//! C ABI for the braidleg engine.
//!
//! Contexts and elements are opaque handles; every fallible call returns a
//! status code and writes its result through an out-pointer. String results
//! are heap-allocated and released with [`braidleg_string_free`]; the last
//! error message is kept per thread and read with [`braidleg_last_error`].
//!
//! The header `include/braidleg.h` is generated with cbindgen:
//!
//! ```text
//! cbindgen --config cbindgen.toml --crate braidleg-ffi --output include/braidleg.h
//! ```

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use braidleg::bracket::bracket;
use braidleg::context::Context;
use braidleg::element::Element;
use braidleg::error::EngineError;
use braidleg::parse::parse_element;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BraidlegStatus {
    Ok = 0,
    /// Null pointer, bad UTF-8, or an argument outside its domain.
    InvalidArgument = 1,
    /// The expression text failed to parse.
    ParseError = 2,
    /// A validation error from the engine (indices, dimensions, caps).
    EngineError = 3,
    /// An internal-consistency guarantee failed; indicates a bug.
    InternalError = 4,
}

/// Opaque computation context (dimension and braiding assignment).
pub struct BraidlegContext {
    ctx: Context,
}

/// Opaque algebra element.
pub struct BraidlegElement {
    elem: Element,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &EngineError) -> BraidlegStatus {
    match err {
        EngineError::Syntax { .. } => BraidlegStatus::ParseError,
        EngineError::InternalConsistency(_) => BraidlegStatus::InternalError,
        _ => BraidlegStatus::EngineError,
    }
}

/// The message of the most recent error on this thread. The pointer stays
/// valid until the next failing call on the same thread. Never null.
#[no_mangle]
pub extern "C" fn braidleg_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Create a context. `q_mode` is one of `"symbolic"`, `"ones"`, `"side"`.
///
/// # Safety
/// `q_mode` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn braidleg_context_new(
    s: usize,
    q_mode: *const c_char,
    out: *mut *mut BraidlegContext,
) -> BraidlegStatus {
    if q_mode.is_null() || out.is_null() {
        set_error("null pointer argument");
        return BraidlegStatus::InvalidArgument;
    }
    let mode = match CStr::from_ptr(q_mode).to_str() {
        Ok(m) => m,
        Err(_) => {
            set_error("q_mode is not valid UTF-8");
            return BraidlegStatus::InvalidArgument;
        }
    };
    let ctx = match mode {
        "symbolic" => Context::symbolic(s),
        "ones" => Context::ones(s),
        "side" => Context::side_conditions(s),
        other => {
            set_error(&format!("unknown q mode '{other}'"));
            return BraidlegStatus::InvalidArgument;
        }
    };
    match ctx {
        Ok(ctx) => {
            *out = Box::into_raw(Box::new(BraidlegContext { ctx }));
            BraidlegStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Release a context created by [`braidleg_context_new`].
///
/// # Safety
/// `ctx` must be a pointer from `braidleg_context_new` or null.
#[no_mangle]
pub unsafe extern "C" fn braidleg_context_free(ctx: *mut BraidlegContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Parse an expression into a normal-formed element.
///
/// # Safety
/// All pointers must be valid; `text` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn braidleg_element_parse(
    ctx: *const BraidlegContext,
    text: *const c_char,
    out: *mut *mut BraidlegElement,
) -> BraidlegStatus {
    if ctx.is_null() || text.is_null() || out.is_null() {
        set_error("null pointer argument");
        return BraidlegStatus::InvalidArgument;
    }
    let text = match CStr::from_ptr(text).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("expression is not valid UTF-8");
            return BraidlegStatus::InvalidArgument;
        }
    };
    match parse_element(text, &(*ctx).ctx) {
        Ok(elem) => {
            *out = Box::into_raw(Box::new(BraidlegElement { elem }));
            BraidlegStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Release an element.
///
/// # Safety
/// `elem` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn braidleg_element_free(elem: *mut BraidlegElement) {
    if !elem.is_null() {
        drop(Box::from_raw(elem));
    }
}

/// Render an element in the canonical textual form. The returned string is
/// released with [`braidleg_string_free`].
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn braidleg_element_to_string(
    elem: *const BraidlegElement,
    out: *mut *mut c_char,
) -> BraidlegStatus {
    if elem.is_null() || out.is_null() {
        set_error("null pointer argument");
        return BraidlegStatus::InvalidArgument;
    }
    let text = (*elem).elem.to_string();
    match CString::new(text) {
        Ok(cstr) => {
            *out = cstr.into_raw();
            BraidlegStatus::Ok
        }
        Err(_) => {
            set_error("element text contains an interior NUL");
            BraidlegStatus::InternalError
        }
    }
}

/// Release a string returned by this library.
///
/// # Safety
/// `text` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn braidleg_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

unsafe fn binary_op(
    ctx: *const BraidlegContext,
    a: *const BraidlegElement,
    b: *const BraidlegElement,
    out: *mut *mut BraidlegElement,
    op: impl FnOnce(&Context, &Element, &Element) -> Result<Element, EngineError>,
) -> BraidlegStatus {
    if ctx.is_null() || a.is_null() || b.is_null() || out.is_null() {
        set_error("null pointer argument");
        return BraidlegStatus::InvalidArgument;
    }
    match op(&(*ctx).ctx, &(*a).elem, &(*b).elem) {
        Ok(elem) => {
            *out = Box::into_raw(Box::new(BraidlegElement { elem }));
            BraidlegStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Sum of two elements.
///
/// # Safety
/// All pointers must be valid handles from this library.
#[no_mangle]
pub unsafe extern "C" fn braidleg_element_add(
    ctx: *const BraidlegContext,
    a: *const BraidlegElement,
    b: *const BraidlegElement,
    out: *mut *mut BraidlegElement,
) -> BraidlegStatus {
    binary_op(ctx, a, b, out, |_, x, y| Ok(x.add(y)))
}

/// Braided product of two elements.
///
/// # Safety
/// All pointers must be valid handles from this library.
#[no_mangle]
pub unsafe extern "C" fn braidleg_element_mul(
    ctx: *const BraidlegContext,
    a: *const BraidlegElement,
    b: *const BraidlegElement,
    out: *mut *mut BraidlegElement,
) -> BraidlegStatus {
    binary_op(ctx, a, b, out, |c, x, y| x.mul(y, c))
}

/// Braided Poisson bracket of two elements.
///
/// # Safety
/// All pointers must be valid handles from this library.
#[no_mangle]
pub unsafe extern "C" fn braidleg_element_bracket(
    ctx: *const BraidlegContext,
    a: *const BraidlegElement,
    b: *const BraidlegElement,
    out: *mut *mut BraidlegElement,
) -> BraidlegStatus {
    binary_op(ctx, a, b, out, |c, x, y| bracket(x, y, c))
}

/// Exact syntactic equality of normal forms. Returns 0/1; null handles
/// compare unequal.
///
/// # Safety
/// Handles must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn braidleg_element_eq(
    a: *const BraidlegElement,
    b: *const BraidlegElement,
) -> i32 {
    if a.is_null() || b.is_null() {
        return 0;
    }
    i32::from((*a).elem == (*b).elem)
}

/// True when the element has no terms.
///
/// # Safety
/// `a` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn braidleg_element_is_zero(a: *const BraidlegElement) -> i32 {
    if a.is_null() {
        return 0;
    }
    i32::from((*a).elem.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    unsafe fn ctx(s: usize, mode: &str) -> *mut BraidlegContext {
        let mode = CString::new(mode).unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(
            braidleg_context_new(s, mode.as_ptr(), &mut out),
            BraidlegStatus::Ok
        );
        out
    }

    unsafe fn parse(c: *const BraidlegContext, text: &str) -> *mut BraidlegElement {
        let text = CString::new(text).unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(
            braidleg_element_parse(c, text.as_ptr(), &mut out),
            BraidlegStatus::Ok
        );
        out
    }

    unsafe fn render(e: *const BraidlegElement) -> String {
        let mut out = ptr::null_mut();
        assert_eq!(braidleg_element_to_string(e, &mut out), BraidlegStatus::Ok);
        let s = CStr::from_ptr(out).to_str().unwrap().to_string();
        braidleg_string_free(out);
        s
    }

    #[test]
    fn parse_normal_form_and_render() {
        unsafe {
            let c = ctx(2, "symbolic");
            let e = parse(c, "p1*x2");
            assert_eq!(render(e), "q[1,4]^-1*x2*p1");
            braidleg_element_free(e);
            braidleg_context_free(c);
        }
    }

    #[test]
    fn bracket_through_the_abi() {
        unsafe {
            let c = ctx(1, "ones");
            let p = parse(c, "p1");
            let xx = parse(c, "x1^2");
            let mut out = ptr::null_mut();
            assert_eq!(
                braidleg_element_bracket(c, p, xx, &mut out),
                BraidlegStatus::Ok
            );
            assert_eq!(render(out), "2*x1*h[1,1]");
            let expect = parse(c, "2*x1*h[1,1]");
            assert_eq!(braidleg_element_eq(out, expect), 1);
            for e in [p, xx, out, expect] {
                braidleg_element_free(e);
            }
            braidleg_context_free(c);
        }
    }

    #[test]
    fn errors_set_message_and_status() {
        unsafe {
            let c = ctx(1, "symbolic");
            let text = CString::new("p9").unwrap();
            let mut out = ptr::null_mut();
            let status = braidleg_element_parse(c, text.as_ptr(), &mut out);
            assert_eq!(status, BraidlegStatus::EngineError);
            let msg = CStr::from_ptr(braidleg_last_error()).to_str().unwrap();
            assert!(msg.contains("index"), "{msg}");
            let text = CString::new("p1**").unwrap();
            let status = braidleg_element_parse(c, text.as_ptr(), &mut out);
            assert_eq!(status, BraidlegStatus::ParseError);
            braidleg_context_free(c);
        }
    }

    #[test]
    fn mul_matches_engine() {
        unsafe {
            let c = ctx(2, "symbolic");
            let a = parse(c, "p1");
            let b = parse(c, "x2");
            let mut ab = ptr::null_mut();
            assert_eq!(braidleg_element_mul(c, a, b, &mut ab), BraidlegStatus::Ok);
            let direct = parse(c, "p1*x2");
            assert_eq!(braidleg_element_eq(ab, direct), 1);
            assert_eq!(braidleg_element_is_zero(ab), 0);
            for e in [a, b, ab, direct] {
                braidleg_element_free(e);
            }
            braidleg_context_free(c);
        }
    }
}
