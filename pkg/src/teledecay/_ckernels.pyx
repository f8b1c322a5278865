# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled hot kernels: Lindblad RK4 integration and local Kraus maps.

Signatures match ``_pykernels`` one-for-one.
"""
import numpy as np


cdef void _rhs(const double complex[:, ::1] rho,
               const Py_ssize_t[:, :, ::1] jcol,
               const double complex[:, :, ::1] jval,
               const Py_ssize_t[:, ::1] jnnz,
               const double[::1] rates,
               const Py_ssize_t[:, ::1] dcol,
               const double complex[:, ::1] dval,
               const Py_ssize_t[::1] dnnz,
               double complex[:, ::1] out) noexcept nogil:
    # operators are stored row-sparse: row i of L has jnnz[k, i] entries
    # jval[k, i, p] at columns jcol[k, i, p]; the decay term D is Hermitian
    # so (rho D)_ij = sum_p rho[i, dcol[j, p]] * conj(dval[j, p])
    cdef Py_ssize_t d = rho.shape[0]
    cdef Py_ssize_t m = rates.shape[0]
    cdef Py_ssize_t i, j, k, p, q
    cdef double complex s, t
    for i in range(d):
        for j in range(d):
            s = 0
            for p in range(dnnz[i]):
                s = s - dval[i, p] * rho[dcol[i, p], j]
            for p in range(dnnz[j]):
                s = s - rho[i, dcol[j, p]] * dval[j, p].conjugate()
            for k in range(m):
                t = 0
                for p in range(jnnz[k, i]):
                    for q in range(jnnz[k, j]):
                        t = t + jval[k, i, p] * rho[jcol[k, i, p], jcol[k, j, q]] * jval[k, j, q].conjugate()
                s = s + rates[k] * t
            out[i, j] = s


cdef tuple _row_sparse(mats):
    """Padded row-sparse (ELL) layout of a stack of square matrices."""
    nz = mats != 0
    counts = nz.sum(axis=2)
    width = max(int(counts.max()), 1)
    # stable sort puts each row's nonzero columns first, in column order
    cols = np.ascontiguousarray(np.argsort(~nz, axis=2, kind="stable")[:, :, :width], dtype=np.intp)
    vals = np.ascontiguousarray(np.take_along_axis(mats, cols, axis=2), dtype=np.complex128)
    return cols, vals, np.ascontiguousarray(counts, dtype=np.intp)


cdef tuple _prepare(jumps, rates):
    jumps = np.ascontiguousarray(jumps, dtype=np.complex128)
    rates = np.ascontiguousarray(rates, dtype=np.float64)
    keep = rates != 0.0
    jumps = np.ascontiguousarray(jumps[keep])
    rates = np.ascontiguousarray(rates[keep])
    g = rates[:, None, None]
    decay = 0.5 * np.sum(g * (jumps.conj().transpose(0, 2, 1) @ jumps), axis=0)
    decay = 0.5 * (decay + decay.conj().T)
    jcol, jval, jnnz = _row_sparse(jumps)
    dcol, dval, dnnz = _row_sparse(decay[None])
    return jcol, jval, jnnz, rates, dcol[0], dval[0], dnnz[0]


def lindblad_rhs(rho, jumps, rates):
    """Dissipator sum_k (g_k/2)(2 L rho L^+ - {L^+ L, rho}) for full-space jumps."""
    cdef double complex[:, ::1] r = np.ascontiguousarray(rho, dtype=np.complex128)
    cdef Py_ssize_t d = r.shape[0]
    out = np.zeros((d, d), dtype=np.complex128)
    if len(rates) == 0 or not np.any(np.asarray(rates) != 0.0):
        return out
    jc, jv, jn, g, dc, dv, dn = _prepare(jumps, rates)
    _rhs(r, jc, jv, jn, g, dc, dv, dn, out)
    return out


def rk4_lindblad(rho0, jumps, rates, double t_end, Py_ssize_t n_steps):
    """Classical RK4 from 0 to ``t_end`` in ``n_steps`` equal steps.

    The state is re-Hermitized after every step.
    """
    rho_arr = np.array(rho0, dtype=np.complex128, order="C", copy=True)
    if n_steps <= 0 or not np.any(np.asarray(rates) != 0.0):
        return rho_arr
    jc_arr, jv_arr, jn_arr, g_arr, dc_arr, dv_arr, dn_arr = _prepare(jumps, rates)
    cdef Py_ssize_t d = rho_arr.shape[0]
    cdef double complex[:, ::1] rho = rho_arr
    cdef const Py_ssize_t[:, :, ::1] jc = jc_arr
    cdef const double complex[:, :, ::1] jv = jv_arr
    cdef const Py_ssize_t[:, ::1] jn = jn_arr
    cdef const double[::1] gv = g_arr
    cdef const Py_ssize_t[:, ::1] dc = dc_arr
    cdef const double complex[:, ::1] dv = dv_arr
    cdef const Py_ssize_t[::1] dn = dn_arr
    cdef double complex[:, ::1] y = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] k1 = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] k2 = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] k3 = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] k4 = np.empty((d, d), dtype=np.complex128)
    cdef double h = t_end / n_steps
    cdef double h6 = h / 6.0
    cdef Py_ssize_t step, i, j
    cdef double complex a, b
    with nogil:
        for step in range(n_steps):
            _rhs(rho, jc, jv, jn, gv, dc, dv, dn, k1)
            for i in range(d):
                for j in range(d):
                    y[i, j] = rho[i, j] + 0.5 * h * k1[i, j]
            _rhs(y, jc, jv, jn, gv, dc, dv, dn, k2)
            for i in range(d):
                for j in range(d):
                    y[i, j] = rho[i, j] + 0.5 * h * k2[i, j]
            _rhs(y, jc, jv, jn, gv, dc, dv, dn, k3)
            for i in range(d):
                for j in range(d):
                    y[i, j] = rho[i, j] + h * k3[i, j]
            _rhs(y, jc, jv, jn, gv, dc, dv, dn, k4)
            for i in range(d):
                for j in range(d):
                    y[i, j] = rho[i, j] + h6 * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])
            for i in range(d):
                for j in range(i, d):
                    a = y[i, j]
                    b = y[j, i].conjugate()
                    rho[i, j] = 0.5 * (a + b)
                    rho[j, i] = rho[i, j].conjugate()
    return rho_arr


def apply_local_kraus(rho, kraus, int qubit, int n_qubits):
    """Apply a single-qubit Kraus set to ``qubit`` (0-based, most significant first)."""
    cdef const double complex[:, ::1] r = np.ascontiguousarray(rho, dtype=np.complex128)
    cdef const double complex[:, :, ::1] kv = np.ascontiguousarray(kraus, dtype=np.complex128)
    cdef Py_ssize_t d = r.shape[0]
    cdef Py_ssize_t nk = kv.shape[0]
    cdef int shift = n_qubits - 1 - qubit
    cdef Py_ssize_t mask = (<Py_ssize_t>1) << shift
    out_arr = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, i0, j0, k, a, b, bi, bj
    cdef double complex s
    with nogil:
        for i in range(d):
            bi = (i >> shift) & 1
            i0 = i & ~mask
            for j in range(d):
                bj = (j >> shift) & 1
                j0 = j & ~mask
                s = 0
                for k in range(nk):
                    for a in range(2):
                        for b in range(2):
                            s = s + kv[k, bi, a] * r[i0 | (a << shift), j0 | (b << shift)] * kv[k, bj, b].conjugate()
                out[i, j] = s
    return out_arr
