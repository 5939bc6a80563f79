//! C interface to `blaschke`.
//!
//! Every function returns a [`BlStatus`]; on failure a message is kept per
//! thread and read with [`bl_last_error`]. Products are opaque handles
//! released with [`bl_product_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use blaschke::critical::critical_points;
use blaschke::preimage::fiber;
use blaschke::render::{render, AnnulusScheme, Mode, RasterScene};
use blaschke::{BlaschkeProduct, Complex, Error, ExtComplex, FamilySpec, Zero, ZeroSequence};

/// Opaque product handle.
pub struct BlProduct(BlaschkeProduct);

/// A point of the Riemann sphere; `re`, `im` are ignored when `is_infinite`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlPoint {
    pub re: f64,
    pub im: f64,
    pub is_infinite: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParam = 2,
    PoleInput = 3,
    SolverFail = 4,
    BufferTooSmall = 5,
    GuardExceeded = 6,
    Internal = 7,
}

/// Image mode values for [`bl_render`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlMode {
    Preimage = 0,
    Target = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> BlStatus {
    match e {
        Error::RejectParam(_) | Error::Config(_) | Error::Degenerate(_) => BlStatus::InvalidParam,
        Error::PoleInput { .. } => BlStatus::PoleInput,
        Error::SolverFail { .. } => BlStatus::SolverFail,
        Error::GuardExceeded(_) => BlStatus::GuardExceeded,
        _ => BlStatus::Internal,
    }
}

/// Run `f`, record any error or panic, and return its status.
fn guard(f: impl FnOnce() -> Result<(), (BlStatus, String)>) -> BlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            BlStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BlStatus::Internal
        }
    }
}

fn lib(e: Error) -> (BlStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (BlStatus, String) {
    (BlStatus::NullPointer, format!("{what} is null"))
}

fn to_ext(p: BlPoint) -> Result<ExtComplex, (BlStatus, String)> {
    if p.is_infinite {
        return Ok(ExtComplex::Infinity);
    }
    if !(p.re.is_finite() && p.im.is_finite()) {
        return Err((
            BlStatus::InvalidParam,
            "point has a non-finite coordinate".into(),
        ));
    }
    Ok(ExtComplex::Finite(Complex::new(p.re, p.im)))
}

fn from_ext(z: ExtComplex) -> BlPoint {
    match z {
        ExtComplex::Finite(c) => BlPoint {
            re: c.re,
            im: c.im,
            is_infinite: false,
        },
        ExtComplex::Infinity => BlPoint {
            re: 0.0,
            im: 0.0,
            is_infinite: true,
        },
    }
}

fn build(spec: FamilySpec, out: *mut *mut BlProduct) -> BlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let b = BlaschkeProduct::build(&spec).map_err(lib)?;
        // SAFETY: `out` is non-null and points to writable storage per the contract.
        unsafe { *out = Box::into_raw(Box::new(BlProduct(b))) };
        Ok(())
    })
}

/// The factor with zero `a` raised to the power `n`.
#[no_mangle]
pub extern "C" fn bl_single_power(
    a_re: f64,
    a_im: f64,
    n: u32,
    out: *mut *mut BlProduct,
) -> BlStatus {
    build(
        FamilySpec::SinglePower {
            a: Complex::new(a_re, a_im),
            n,
        },
        out,
    )
}

#[no_mangle]
pub extern "C" fn bl_two_zeros(
    a1_re: f64,
    a1_im: f64,
    a2_re: f64,
    a2_im: f64,
    n: u32,
    out: *mut *mut BlProduct,
) -> BlStatus {
    build(
        FamilySpec::TwoZeros {
            a1: Complex::new(a1_re, a1_im),
            a2: Complex::new(a2_re, a2_im),
            n,
        },
        out,
    )
}

/// Zeros `r e^{i alpha} w_k` over the `n`-th roots of unity.
#[no_mangle]
pub extern "C" fn bl_rotational(r: f64, alpha: f64, n: u32, out: *mut *mut BlProduct) -> BlStatus {
    build(FamilySpec::Rotational { r, alpha, n }, out)
}

#[no_mangle]
pub extern "C" fn bl_two_rings(
    r1: f64,
    alpha1: f64,
    r2: f64,
    alpha2: f64,
    n: u32,
    out: *mut *mut BlProduct,
) -> BlStatus {
    build(
        FamilySpec::TwoRings {
            r1,
            alpha1,
            r2,
            alpha2,
            n,
        },
        out,
    )
}

/// First `m` zeros of the inverse-square sequence with `symmetry`-fold symmetry.
#[no_mangle]
pub extern "C" fn bl_partial_infinite(
    symmetry: u32,
    m: usize,
    out: *mut *mut BlProduct,
) -> BlStatus {
    build(
        FamilySpec::PartialInfinite {
            rule: ZeroSequence::InverseSquare { symmetry },
            m,
        },
        out,
    )
}

/// Simple zeros at `re[i] + i im[i]`, `i < len`.
///
/// # Safety
/// `re` and `im` must point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn bl_custom(
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut BlProduct,
) -> BlStatus {
    if re.is_null() || im.is_null() {
        set_error("zero arrays are null");
        return BlStatus::NullPointer;
    }
    // SAFETY: caller guarantees `len` readable elements.
    let (re, im) = unsafe {
        (
            std::slice::from_raw_parts(re, len),
            std::slice::from_raw_parts(im, len),
        )
    };
    let zeros = re
        .iter()
        .zip(im)
        .map(|(&x, &y)| Zero {
            point: Complex::new(x, y),
            multiplicity: 1,
        })
        .collect();
    build(FamilySpec::Custom { zeros }, out)
}

/// Release a handle; null is ignored.
///
/// # Safety
/// `b` must come from a builder and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bl_product_free(b: *mut BlProduct) {
    if !b.is_null() {
        // SAFETY: created by Box::into_raw in `build`.
        drop(unsafe { Box::from_raw(b) });
    }
}

fn with_product<'a>(b: *const BlProduct) -> Result<&'a BlaschkeProduct, (BlStatus, String)> {
    // SAFETY: non-null handles come from `build` and outlive the call.
    unsafe { b.as_ref() }
        .map(|p| &p.0)
        .ok_or_else(|| null("product"))
}

fn write<T>(out: *mut T, v: T) -> Result<(), (BlStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    // SAFETY: non-null output pointer supplied by the caller.
    unsafe { out.write(v) };
    Ok(())
}

/// Total number of zeros with multiplicity.
///
/// # Safety
/// `b` is a live handle or null; `out` is writable or null.
#[no_mangle]
pub unsafe extern "C" fn bl_degree(b: *const BlProduct, out: *mut u32) -> BlStatus {
    guard(|| write(out, with_product(b)?.degree()))
}

/// `B(z)` on the sphere.
///
/// # Safety
/// `b` is a live handle or null; `out` is writable or null.
#[no_mangle]
pub unsafe extern "C" fn bl_evaluate(
    b: *const BlProduct,
    z: BlPoint,
    out: *mut BlPoint,
) -> BlStatus {
    guard(|| {
        let b = with_product(b)?;
        write(out, from_ext(b.evaluate(to_ext(z)?)))
    })
}

/// `B'(z)`; fails with `PoleInput` at a pole.
///
/// # Safety
/// `b` is a live handle or null; `out` is writable or null.
#[no_mangle]
pub unsafe extern "C" fn bl_derivative(
    b: *const BlProduct,
    z: BlPoint,
    out: *mut BlPoint,
) -> BlStatus {
    guard(|| {
        let b = with_product(b)?;
        let d = b.derivative(to_ext(z)?).map_err(lib)?;
        write(out, from_ext(d))
    })
}

fn fill(
    points: &[BlPoint],
    buf: *mut BlPoint,
    cap: usize,
    len: *mut usize,
) -> Result<(), (BlStatus, String)> {
    write(len, points.len())?;
    if points.len() > cap {
        return Err((
            BlStatus::BufferTooSmall,
            format!("need {} slots, have {cap}", points.len()),
        ));
    }
    if buf.is_null() && !points.is_empty() {
        return Err(null("buffer"));
    }
    // SAFETY: `buf` has room for `cap >= points.len()` elements.
    unsafe { ptr::copy_nonoverlapping(points.as_ptr(), buf, points.len()) };
    Ok(())
}

/// All solutions of `B(z) = w` with multiplicity. `*len` receives the count
/// even when the buffer is too small.
///
/// # Safety
/// `buf` has `cap` writable slots; `len` is writable.
#[no_mangle]
pub unsafe extern "C" fn bl_fiber(
    b: *const BlProduct,
    w: BlPoint,
    buf: *mut BlPoint,
    cap: usize,
    len: *mut usize,
) -> BlStatus {
    guard(|| {
        let b = with_product(b)?;
        let f = fiber(b, to_ext(w)?).map_err(lib)?;
        let pts: Vec<BlPoint> = f.roots.iter().map(|&z| from_ext(z)).collect();
        fill(&pts, buf, cap, len)
    })
}

/// Distinct critical points inside the disk with their orders.
///
/// # Safety
/// `buf` and `orders` have `cap` writable slots (`orders` may be null); `len` is writable.
#[no_mangle]
pub unsafe extern "C" fn bl_critical_points(
    b: *const BlProduct,
    buf: *mut BlPoint,
    orders: *mut u32,
    cap: usize,
    len: *mut usize,
) -> BlStatus {
    guard(|| {
        let b = with_product(b)?;
        let set = critical_points(b).map_err(lib)?;
        let pts: Vec<BlPoint> = set.interior.iter().map(|c| from_ext(c.point)).collect();
        fill(&pts, buf, cap, len)?;
        if !orders.is_null() {
            for (i, c) in set.interior.iter().enumerate() {
                // SAFETY: `orders` has `cap >= pts.len()` slots.
                unsafe { orders.add(i).write(c.order) };
            }
        }
        Ok(())
    })
}

/// Render with the default color scheme into `rgb`, `3 * width * height`
/// bytes, rows top-down. `mode` is a [`BlMode`] value; `b` may be null in
/// target mode. `threads = 0` is auto.
///
/// # Safety
/// `rgb` has `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn bl_render(
    b: *const BlProduct,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    width: u32,
    height: u32,
    mode: u32,
    threads: u32,
    rgb: *mut u8,
    cap: usize,
) -> BlStatus {
    guard(|| {
        // SAFETY: null or a live handle.
        let b = unsafe { b.as_ref() }.map(|p| &p.0);
        let mode = match mode {
            m if m == BlMode::Preimage as u32 => Mode::Preimage,
            m if m == BlMode::Target as u32 => Mode::Target,
            m => return Err((BlStatus::InvalidParam, format!("unknown mode {m}"))),
        };
        let scene = RasterScene::new((x0, x1, y0, y1), width, height, mode);
        let need = 3 * width as usize * height as usize;
        if rgb.is_null() {
            return Err(null("rgb"));
        }
        if cap < need {
            return Err((
                BlStatus::BufferTooSmall,
                format!("need {need} bytes, have {cap}"),
            ));
        }
        let threads = (threads > 0).then_some(threads as usize);
        let img = render(b, &scene, &AnnulusScheme::default(), threads).map_err(lib)?;
        let data = img.top_down();
        // SAFETY: `rgb` has at least `need == data.len()` bytes.
        unsafe { ptr::copy_nonoverlapping(data.as_ptr(), rgb, data.len()) };
        Ok(())
    })
}

/// Message for the last failed call on this thread, empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn bl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
