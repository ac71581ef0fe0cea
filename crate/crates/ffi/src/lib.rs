//! C interface to the `santalo` crate.
//!
//! Objects cross the boundary as opaque pointers that the caller releases
//! with the matching `*_free` function. Every fallible call returns a
//! [`SantaloStatus`]; the message of the last failure on the calling thread
//! is available from [`santalo_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use santalo::bodies::{blaschke_santalo_check, ConvexPolytope};
use santalo::equipartition::{yy_equipartition, EquipartitionReport, SolverOptions};
use santalo::fixtures;
use santalo::inequalities::{santalo_verify, weight_integral, RadialWeight};
use santalo::io::{to_json_string, ReportJson};
use santalo::measures::WeightedPointCloud;
use santalo::SantaloError;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SantaloStatus {
    Ok = 0,
    /// The checked inequality does not hold.
    VerifiedFail = 1,
    /// The solver stopped without meeting its tolerance.
    NotConverged = 2,
    InvalidInput = 3,
    NullPointer = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SantaloWeight {
    IndicatorUnit = 0,
    Gaussian = 1,
}

/// A weighted point cloud.
pub struct SantaloCloud(WeightedPointCloud);

/// An equipartition result: the tree and its cone masses.
pub struct SantaloTree(EquipartitionReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &SantaloError) -> SantaloStatus {
    set_error(e.to_string());
    if e.is_convergence() {
        SantaloStatus::NotConverged
    } else {
        SantaloStatus::InvalidInput
    }
}

fn guard<F: FnOnce() -> SantaloStatus>(f: F) -> SantaloStatus {
    clear_error();
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| {
        set_error("panic inside santalo");
        SantaloStatus::Panic
    })
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn santalo_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Creates a cloud from `len` points (`coords` holds `len * dim` values,
/// row by row) with positive `weights`. Returns NULL on invalid input.
///
/// # Safety
/// `coords` and `weights` must point to arrays of the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn santalo_cloud_new(
    dim: usize,
    coords: *const f64,
    weights: *const f64,
    len: usize,
) -> *mut SantaloCloud {
    let mut out = ptr::null_mut();
    guard(|| {
        if coords.is_null() || weights.is_null() {
            set_error("null coordinate or weight array");
            return SantaloStatus::NullPointer;
        }
        let Some(total) = dim.checked_mul(len) else {
            set_error("cloud size overflows");
            return SantaloStatus::InvalidInput;
        };
        let c = slice::from_raw_parts(coords, total).to_vec();
        let w = slice::from_raw_parts(weights, len).to_vec();
        match WeightedPointCloud::new(dim, c, w) {
            Ok(cloud) => {
                out = Box::into_raw(Box::new(SantaloCloud(cloud)));
                SantaloStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    });
    out
}

/// # Safety
/// `cloud` must come from [`santalo_cloud_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn santalo_cloud_free(cloud: *mut SantaloCloud) {
    if !cloud.is_null() {
        drop(Box::from_raw(cloud));
    }
}

/// Computes a Yao-Yao equipartition (dimension 1 to 3). On `Ok` and on
/// `NotConverged` a tree is stored in `*out` (the best attempt in the
/// latter case) and must be released with [`santalo_tree_free`].
///
/// # Safety
/// `cloud` must be a live cloud and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn santalo_equipartition(
    cloud: *const SantaloCloud,
    mass_tol: f64,
    even: bool,
    out: *mut *mut SantaloTree,
) -> SantaloStatus {
    guard(|| {
        if cloud.is_null() || out.is_null() {
            set_error("null cloud or output pointer");
            return SantaloStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let opts = SolverOptions {
            mass_tol,
            even_mode: even,
            ..Default::default()
        };
        match yy_equipartition(&(*cloud).0, &opts) {
            Ok(report) => {
                *out = Box::into_raw(Box::new(SantaloTree(report)));
                SantaloStatus::Ok
            }
            Err(e) => {
                let status = status_of(&e);
                if let SantaloError::NotConverged { best } | SantaloError::NoBracket { best, .. } = e {
                    *out = Box::into_raw(Box::new(SantaloTree(*best)));
                }
                status
            }
        }
    })
}

/// # Safety
/// `tree` must come from [`santalo_equipartition`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn santalo_tree_free(tree: *mut SantaloTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}

/// Ambient dimension of the tree (0 for NULL).
///
/// # Safety
/// `tree` must be NULL or a live tree.
#[no_mangle]
pub unsafe extern "C" fn santalo_tree_dim(tree: *const SantaloTree) -> usize {
    tree.as_ref().map_or(0, |t| t.0.tree.dim())
}

/// Number of cones, `2^dim` (0 for NULL).
///
/// # Safety
/// `tree` must be NULL or a live tree.
#[no_mangle]
pub unsafe extern "C" fn santalo_tree_leaf_count(tree: *const SantaloTree) -> usize {
    tree.as_ref().map_or(0, |t| t.0.tree.leaf_count())
}

/// Largest deviation of a cone mass from `total / 2^dim`.
///
/// # Safety
/// `tree` must be NULL or a live tree.
#[no_mangle]
pub unsafe extern "C" fn santalo_tree_max_imbalance(tree: *const SantaloTree) -> f64 {
    tree.as_ref().map_or(f64::NAN, |t| t.0.max_imbalance)
}

unsafe fn copy_out(values: &[f64], out: *mut f64, len: usize) -> SantaloStatus {
    if out.is_null() {
        set_error("null output array");
        return SantaloStatus::NullPointer;
    }
    if len < values.len() {
        set_error(format!("output array holds {len} values, {} needed", values.len()));
        return SantaloStatus::InvalidInput;
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    SantaloStatus::Ok
}

/// Writes the center (`dim` values) to `out`.
///
/// # Safety
/// `tree` must be a live tree and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn santalo_tree_center(tree: *const SantaloTree, out: *mut f64, len: usize) -> SantaloStatus {
    guard(|| match tree.as_ref() {
        None => {
            set_error("null tree");
            SantaloStatus::NullPointer
        }
        Some(t) => copy_out(t.0.tree.center().as_slice(), out, len),
    })
}

/// Writes the cone masses (`leaf_count` values, leaf order) to `out`.
///
/// # Safety
/// `tree` must be a live tree and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn santalo_tree_cone_masses(tree: *const SantaloTree, out: *mut f64, len: usize) -> SantaloStatus {
    guard(|| match tree.as_ref() {
        None => {
            set_error("null tree");
            SantaloStatus::NullPointer
        }
        Some(t) => copy_out(&t.0.masses, out, len),
    })
}

/// The equipartition report as JSON; release with [`santalo_string_free`].
/// Returns NULL on failure.
///
/// # Safety
/// `tree` must be NULL or a live tree.
#[no_mangle]
pub unsafe extern "C" fn santalo_tree_to_json(tree: *const SantaloTree) -> *mut c_char {
    let mut out = ptr::null_mut();
    guard(|| {
        let Some(t) = tree.as_ref() else {
            set_error("null tree");
            return SantaloStatus::NullPointer;
        };
        match to_json_string(&ReportJson::from(&t.0)) {
            Ok(s) => {
                out = CString::new(s).map_or(ptr::null_mut(), CString::into_raw);
                SantaloStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    });
    out
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn santalo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `int_{R^n} rho(|x|) dx` for a built-in weight.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn santalo_weight_integral(weight: SantaloWeight, n: usize, out: *mut f64) -> SantaloStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return SantaloStatus::NullPointer;
        }
        let rho = match weight {
            SantaloWeight::IndicatorUnit => RadialWeight::IndicatorUnit,
            SantaloWeight::Gaussian => RadialWeight::Gaussian,
        };
        match weight_integral(&rho, n) {
            Ok(v) => {
                *out = v;
                SantaloStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Volume product of the polytope with `count` vertices (row by row in
/// `vertices`, `dim` values each) about the point `z`, against `v_n^2`.
/// Returns `VerifiedFail` when the product exceeds the bound.
///
/// # Safety
/// Arrays must have the stated lengths; `product` and `bound` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn santalo_volume_product(
    vertices: *const f64,
    count: usize,
    dim: usize,
    z: *const f64,
    product: *mut f64,
    bound: *mut f64,
) -> SantaloStatus {
    guard(|| {
        if vertices.is_null() || z.is_null() || product.is_null() || bound.is_null() {
            set_error("null argument");
            return SantaloStatus::NullPointer;
        }
        let Some(total) = dim.checked_mul(count) else {
            set_error("polytope size overflows");
            return SantaloStatus::InvalidInput;
        };
        if dim == 0 {
            set_error("dimension must be positive");
            return SantaloStatus::InvalidInput;
        }
        let pts = slice::from_raw_parts(vertices, total).chunks(dim).map(<[f64]>::to_vec).collect();
        let z = slice::from_raw_parts(z, dim);
        match ConvexPolytope::new(pts).and_then(|p| blaschke_santalo_check(&p, z)) {
            Ok(c) => {
                *product = c.product;
                *bound = c.bound;
                if c.passed {
                    SantaloStatus::Ok
                } else {
                    SantaloStatus::VerifiedFail
                }
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Evaluates the built-in one-dimensional counterexample with the
/// barycenter as center: `lhs = int f int g`, `rhs = (int rho)^2`.
/// Returns `VerifiedFail`, since `lhs > rhs`.
///
/// # Safety
/// `lhs` and `rhs` must be writable.
#[no_mangle]
pub unsafe extern "C" fn santalo_barycenter_counterexample(lhs: *mut f64, rhs: *mut f64) -> SantaloStatus {
    guard(|| {
        if lhs.is_null() || rhs.is_null() {
            set_error("null output pointer");
            return SantaloStatus::NullPointer;
        }
        match santalo_verify(&fixtures::step_f(), &fixtures::step_g(), &RadialWeight::IndicatorUnit) {
            Ok(c) => {
                *lhs = c.lhs;
                *rhs = c.rhs;
                if c.passed {
                    SantaloStatus::Ok
                } else {
                    SantaloStatus::VerifiedFail
                }
            }
            Err(e) => status_of(&e),
        }
    })
}
