//! C ABI over `plap_bounds`.
//!
//! Every function returns a [`PlbStatus`]; on failure the message is kept per
//! thread and read with [`plb_last_error_message`]. Domains and certificate
//! lists are opaque handles released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use plap_bounds::bounds::{best_bound, BoundCertificate, BoundConfig, Method};
use plap_bounds::cli::{oracle_estimate, DomainFile};
use plap_bounds::error::Error;
use plap_bounds::geometry::{Domain, Label, RingSpec, Vec2};
use plap_bounds::one_dim::{mu_I, radial_eigenvalue, Arrangement, Exponent, RadialEigenProblem};

/// Result code of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Geometry = 3,
    Radial = 4,
    Oracle = 5,
    OutOfRange = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlbLabel {
    Dirichlet = 0,
    Neumann = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlbArrangement {
    NeumannInnerDirichletOuter = 0,
    DirichletInnerNeumannOuter = 1,
    DirichletBoth = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlbMethod {
    Boggio = 0,
    Hardy = 1,
    RadialHardy = 2,
    Mixed = 3,
    Box = 4,
    Annulus = 5,
    Convex = 6,
    Monotonicity = 7,
}

impl From<Method> for PlbMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Boggio => PlbMethod::Boggio,
            Method::Hardy => PlbMethod::Hardy,
            Method::RadialHardy => PlbMethod::RadialHardy,
            Method::Mixed => PlbMethod::Mixed,
            Method::Box => PlbMethod::Box,
            Method::Annulus => PlbMethod::Annulus,
            Method::Convex => PlbMethod::Convex,
            Method::Monotonicity => PlbMethod::Monotonicity,
        }
    }
}

/// Bound settings; obtain defaults from [`plb_config_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct PlbConfig {
    pub grid_h: f64,
    pub n_angles: usize,
    pub n_boundary_samples: usize,
    pub tol: f64,
    pub gamma_steps: usize,
}

/// Flattened view of one certificate.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct PlbCertificate {
    pub method: PlbMethod,
    pub applicable: bool,
    /// Meaningful only when `applicable`.
    pub value: f64,
    pub has_witness: bool,
    pub witness_x: f64,
    pub witness_y: f64,
}

/// Opaque validated domain.
pub struct PlbDomain {
    domain: Domain,
    superdomain: Option<Domain>,
}

/// Opaque list of certificates, best first.
pub struct PlbCertificates {
    items: Vec<BoundCertificate>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(PlbStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Geometry(_) => PlbStatus::Geometry,
            Error::Radial(_) => PlbStatus::Radial,
            Error::Oracle(_) => PlbStatus::Oracle,
            Error::InvalidArgument(_) => PlbStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(PlbStatus::NullPointer, format!("{name} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PlbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PlbStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            PlbStatus::Panic
        }
    }
}

fn exponent(p: f64) -> Result<Exponent, Failure> {
    Exponent::new(p).map_err(|e| Failure::from(Error::from(e)))
}

fn lift<T, E: Into<Error>>(r: Result<T, E>) -> Result<T, Failure> {
    r.map_err(|e| Failure::from(e.into()))
}

/// Message of the last failed call on this thread, or null.
///
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn plb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static name of a [`PlbMethod`] code, such as `"Box"`; null for an
/// unknown code.
#[no_mangle]
pub extern "C" fn plb_method_name(method: u32) -> *const c_char {
    const NAMES: [&CStr; 8] = [
        c"Boggio",
        c"Hardy",
        c"RadialHardy",
        c"Mixed",
        c"Box",
        c"Annulus",
        c"Convex",
        c"Monotonicity",
    ];
    NAMES.get(method as usize).map_or(ptr::null(), |s| s.as_ptr())
}

#[no_mangle]
pub extern "C" fn plb_config_default() -> PlbConfig {
    let c = BoundConfig::default();
    PlbConfig {
        grid_h: c.grid_h,
        n_angles: c.n_angles,
        n_boundary_samples: c.n_boundary_samples,
        tol: c.tol,
        gamma_steps: c.gamma_steps,
    }
}

unsafe fn points(xy: *const f64, n: usize) -> Vec<Vec2> {
    std::slice::from_raw_parts(xy, 2 * n)
        .chunks_exact(2)
        .map(|c| Vec2::new(c[0], c[1]))
        .collect()
}

/// Builds a simply connected domain.
///
/// # Safety
/// `xy` holds `2 * n_vertices` doubles and `labels` holds `n_vertices`
/// [`PlbLabel`] codes, label `i` belonging to the edge from vertex `i` to
/// `i + 1`.
/// `normals` is null or holds `2 * n_vertices` doubles; `origin` is null or
/// holds 2 doubles. `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn plb_domain_new(
    xy: *const f64,
    n_vertices: usize,
    labels: *const u32,
    normals: *const f64,
    origin: *const f64,
    out: *mut *mut PlbDomain,
) -> PlbStatus {
    guard(|| {
        if xy.is_null() {
            return Err(null("xy"));
        }
        if labels.is_null() {
            return Err(null("labels"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let verts = points(xy, n_vertices);
        let labels = std::slice::from_raw_parts(labels, n_vertices)
            .iter()
            .map(|l| match *l {
                x if x == PlbLabel::Dirichlet as u32 => Ok(Label::Dirichlet),
                x if x == PlbLabel::Neumann as u32 => Ok(Label::Neumann),
                x => Err(Failure(PlbStatus::InvalidArgument, format!("unknown label code {x}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut spec = RingSpec::new(verts, labels);
        if !normals.is_null() {
            spec = spec.with_normals(points(normals, n_vertices));
        }
        let origin = (!origin.is_null()).then(|| Vec2::new(*origin, *origin.add(1)));
        let domain = lift(Domain::new(spec, Vec::new(), origin))?;
        *out = Box::into_raw(Box::new(PlbDomain {
            domain,
            superdomain: None,
        }));
        Ok(())
    })
}

/// Parses a TOML domain file, holes and superdomain included. `p_out` and
/// `d_out` receive the file's exponent and dimension when not null.
///
/// # Safety
/// `text` is a nul-terminated UTF-8 string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn plb_domain_from_toml(
    text: *const c_char,
    out: *mut *mut PlbDomain,
    p_out: *mut f64,
    d_out: *mut u32,
) -> PlbStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Failure(PlbStatus::InvalidArgument, format!("text is not UTF-8: {e}")))?;
        let loaded = DomainFile::parse(s).and_then(|f| f.load())?;
        if !p_out.is_null() {
            *p_out = loaded.p.p();
        }
        if !d_out.is_null() {
            *d_out = loaded.d;
        }
        *out = Box::into_raw(Box::new(PlbDomain {
            domain: loaded.domain,
            superdomain: loaded.superdomain,
        }));
        Ok(())
    })
}

/// # Safety
/// `domain` is null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn plb_domain_free(domain: *mut PlbDomain) {
    if !domain.is_null() {
        drop(Box::from_raw(domain));
    }
}

unsafe fn domain_ref<'a>(d: *const PlbDomain) -> Result<&'a PlbDomain, Failure> {
    d.as_ref().ok_or_else(|| null("domain"))
}

/// # Safety
/// `domain` is a live handle and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn plb_domain_contains(domain: *const PlbDomain, x: f64, y: f64, out: *mut bool) -> PlbStatus {
    guard(|| {
        let d = domain_ref(domain)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = d.domain.contains(Vec2::new(x, y));
        Ok(())
    })
}

/// # Safety
/// `domain` is a live handle and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn plb_domain_area(domain: *const PlbDomain, out: *mut f64) -> PlbStatus {
    guard(|| {
        let d = domain_ref(domain)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = d.domain.area();
        Ok(())
    })
}

/// One-dimensional constant `mu_I` for exponent `p`.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn plb_mu_interval(p: f64, out: *mut f64) -> PlbStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = lift(mu_I(exponent(p)?, 1e-10))?;
        Ok(())
    })
}

/// Fundamental eigenvalue of the annulus `r_inner < |x| < r_outer` in
/// dimension `d`; `arrangement` is a [`PlbArrangement`] code.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn plb_radial_eigenvalue(
    r_inner: f64,
    r_outer: f64,
    p: f64,
    d: u32,
    arrangement: u32,
    out: *mut f64,
) -> PlbStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let arr = match arrangement {
            0 => Arrangement::NeumannInnerDirichletOuter,
            1 => Arrangement::DirichletInnerNeumannOuter,
            2 => Arrangement::DirichletBoth,
            x => return Err(Failure(PlbStatus::InvalidArgument, format!("unknown arrangement code {x}"))),
        };
        let problem = lift(RadialEigenProblem::new(r_inner, r_outer, p, d, arr))?;
        *out = lift(radial_eigenvalue(&problem, 1e-10))?.eigenvalue;
        Ok(())
    })
}

/// Grid estimate of the fundamental eigenvalue at spacing `h`.
///
/// # Safety
/// `domain` is a live handle and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn plb_oracle_eigenvalue(domain: *const PlbDomain, p: f64, h: f64, out: *mut f64) -> PlbStatus {
    guard(|| {
        let d = domain_ref(domain)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = oracle_estimate(&d.domain, exponent(p)?, h)?.value;
        Ok(())
    })
}

/// Runs every bound. `config` may be null for the defaults.
///
/// # Safety
/// `domain` is a live handle, `config` is null or readable, `out` is
/// writable. Release the result with [`plb_certificates_free`].
#[no_mangle]
pub unsafe extern "C" fn plb_best_bounds(
    domain: *const PlbDomain,
    p: f64,
    d: u32,
    config: *const PlbConfig,
    out: *mut *mut PlbCertificates,
) -> PlbStatus {
    guard(|| {
        let dom = domain_ref(domain)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let c = config.as_ref().copied().unwrap_or_else(|| plb_config_default());
        let cfg = BoundConfig {
            grid_h: c.grid_h,
            n_angles: c.n_angles,
            n_boundary_samples: c.n_boundary_samples,
            tol: c.tol,
            gamma_steps: c.gamma_steps,
            superdomain: dom.superdomain.clone(),
        };
        let items = best_bound(&dom.domain, exponent(p)?, d, &cfg)?;
        *out = Box::into_raw(Box::new(PlbCertificates { items }));
        Ok(())
    })
}

/// Number of certificates; 0 for a null handle.
///
/// # Safety
/// `list` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn plb_certificates_len(list: *const PlbCertificates) -> usize {
    list.as_ref().map_or(0, |l| l.items.len())
}

/// # Safety
/// `list` is a live handle and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn plb_certificates_get(
    list: *const PlbCertificates,
    index: usize,
    out: *mut PlbCertificate,
) -> PlbStatus {
    guard(|| {
        let l = list.as_ref().ok_or_else(|| null("list"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let c = l.items.get(index).ok_or_else(|| {
            Failure(
                PlbStatus::OutOfRange,
                format!("index {index} out of range for {} certificates", l.items.len()),
            )
        })?;
        let w = c.infimum_witness;
        *out = PlbCertificate {
            method: c.method.into(),
            applicable: c.is_applicable(),
            value: c.value.unwrap_or(f64::NAN),
            has_witness: w.is_some(),
            witness_x: w.map_or(f64::NAN, |w| w.x),
            witness_y: w.map_or(f64::NAN, |w| w.y),
        };
        Ok(())
    })
}

/// # Safety
/// `list` is null or a handle from [`plb_best_bounds`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn plb_certificates_free(list: *mut PlbCertificates) {
    if !list.is_null() {
        drop(Box::from_raw(list));
    }
}
