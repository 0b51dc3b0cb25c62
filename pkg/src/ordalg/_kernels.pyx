# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled adaptive Gauss-Kronrod kernel; same algorithm as ``_kernels_py``."""

from libc.math cimport exp, log, pow, fabs
from libc.stdlib cimport malloc, free

cdef double XGK[8]
cdef double WGK[8]
cdef double WG[4]
XGK[:] = [0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
          0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
          0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
          0.207784955007898467600689403773245, 0.0]
WGK[:] = [0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
          0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
          0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
          0.204432940075298892414161999234649, 0.209482141084727828012999174891714]
WG[:] = [0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
         0.381830050505118944950369775488975, 0.417959183673469387755102040816327]


cdef struct Spec:
    const double* c
    const double* e
    const long* k
    int n
    double lead
    double power
    int absolute
    int kind
    double base
    double span
    double x0


cdef inline double integrand(const Spec* s, double u) nogil:
    cdef double x, L, w, t, acc = 0.0
    cdef int i
    if s.kind == 0:
        x = s.x0 + s.span * u
        L = log(x)
        w = s.span / x
    elif s.kind == 1:
        L = s.base + s.span * log(u)
        w = s.span / u
    elif s.kind == 2:
        L = s.base - s.span * log(u)
        w = s.span / u
    else:
        L = s.base + s.span * u
        w = s.span
    for i in range(s.n):
        t = s.c[i] * exp(s.e[i] * L)
        if s.k[i]:
            t *= pow(L, <double>s.k[i])
        acc += t
    if s.absolute:
        if acc == 0.0:
            return 0.0
        acc = pow(fabs(acc), s.power)
    return exp(s.lead * L) * acc * w


cdef inline void gk15(const Spec* s, double a, double b, double* val, double* err) nogil:
    cdef double center = 0.5 * (a + b)
    cdef double half = 0.5 * (b - a)
    cdef double fc = integrand(s, center)
    cdef double kron = fc * WGK[7]
    cdef double gauss = fc * WG[3]
    cdef double dx, f1, f2
    cdef int j
    for j in range(7):
        dx = half * XGK[j]
        f1 = integrand(s, center - dx)
        f2 = integrand(s, center + dx)
        kron += WGK[j] * (f1 + f2)
        if j % 2 == 1:
            gauss += WG[j // 2] * (f1 + f2)
    val[0] = kron * half
    err[0] = fabs((kron - gauss) * half)


# max-heap of panel indices keyed by (err desc, index asc), matching heapq on (-err, idx)
cdef inline bint before(double* errs, long i, long j) nogil:
    return errs[i] > errs[j] or (errs[i] == errs[j] and i < j)


cdef void heap_push(long* heap, long* size, double* errs, long idx) nogil:
    cdef long pos = size[0]
    cdef long parent
    size[0] += 1
    heap[pos] = idx
    while pos > 0:
        parent = (pos - 1) // 2
        if before(errs, heap[pos], heap[parent]):
            heap[pos], heap[parent] = heap[parent], heap[pos]
            pos = parent
        else:
            break


cdef long heap_pop(long* heap, long* size, double* errs) nogil:
    cdef long top = heap[0]
    cdef long pos = 0, child, n
    size[0] -= 1
    n = size[0]
    heap[0] = heap[n]
    while True:
        child = 2 * pos + 1
        if child >= n:
            break
        if child + 1 < n and before(errs, heap[child + 1], heap[child]):
            child += 1
        if before(errs, heap[child], heap[pos]):
            heap[pos], heap[child] = heap[child], heap[pos]
            pos = child
        else:
            break
    return top


cdef double pairwise(double* vals, long* order, long lo, long hi) nogil:
    cdef double s = 0.0
    cdef long i, mid
    if hi - lo <= 8:
        for i in range(lo, hi):
            s += vals[order[i]]
        return s
    mid = (lo + hi) // 2
    return pairwise(vals, order, lo, mid) + pairwise(vals, order, mid, hi)


def adaptive_integrate(c, e, k, double lead, double power, bint absolute, int kind,
                       double base, double span, double x0, double a, double b,
                       double rel_tol, double abs_tol, long max_panels):
    """Adaptive bisection of the worst panel; returns (value, abs_error, panels)."""
    cdef long n = len(c), i
    cdef double[::1] cv = memoryview(bytearray(8 * max(n, 1))).cast("d")
    cdef double[::1] ev = memoryview(bytearray(8 * max(n, 1))).cast("d")
    cdef long[::1] kv = memoryview(bytearray(8 * max(n, 1))).cast("l")
    for i in range(n):
        cv[i] = c[i]
        ev[i] = e[i]
        kv[i] = k[i]
    cdef Spec s
    s.c = &cv[0]
    s.e = &ev[0]
    s.k = &kv[0]
    s.n = n
    s.lead = lead
    s.power = power
    s.absolute = absolute
    s.kind = kind
    s.base = base
    s.span = span
    s.x0 = x0

    cdef long cap = max_panels + 2
    cdef double* pa = <double*>malloc(cap * sizeof(double))
    cdef double* pb = <double*>malloc(cap * sizeof(double))
    cdef double* pv = <double*>malloc(cap * sizeof(double))
    cdef double* pe = <double*>malloc(cap * sizeof(double))
    cdef long* heap = <long*>malloc(cap * sizeof(long))
    if not (pa and pb and pv and pe and heap):
        free(pa); free(pb); free(pv); free(pe); free(heap)
        raise MemoryError()

    cdef long count = 1, npanels = 1, hsize = 0, idx, last
    cdef double total, total_err, mid, lv, lerr, rv, rerr, ov, oe, value, error
    with nogil:
        pa[0] = a
        pb[0] = b
        gk15(&s, a, b, &pv[0], &pe[0])
        heap_push(heap, &hsize, pe, 0)
        total = pv[0]
        total_err = pe[0]
        while hsize > 0 and total_err > max(rel_tol * fabs(total), abs_tol) and count < max_panels:
            idx = heap_pop(heap, &hsize, pe)
            mid = 0.5 * (pa[idx] + pb[idx])
            if not (pa[idx] < mid < pb[idx]):
                continue
            gk15(&s, pa[idx], mid, &lv, &lerr)
            gk15(&s, mid, pb[idx], &rv, &rerr)
            ov = pv[idx]
            oe = pe[idx]
            last = npanels
            npanels += 1
            pa[last] = mid
            pb[last] = pb[idx]
            pv[last] = rv
            pe[last] = rerr
            pb[idx] = mid
            pv[idx] = lv
            pe[idx] = lerr
            heap_push(heap, &hsize, pe, idx)
            heap_push(heap, &hsize, pe, last)
            total += lv + rv - ov
            total_err += lerr + rerr - oe
            count += 1

    starts = [pa[j] for j in range(npanels)]
    order = sorted(range(npanels), key=starts.__getitem__)
    cdef long* ord_ = <long*>malloc(max(npanels, 1) * sizeof(long))
    for i in range(npanels):
        ord_[i] = order[i]
    value = pairwise(pv, ord_, 0, npanels)
    error = pairwise(pe, ord_, 0, npanels)
    free(ord_); free(pa); free(pb); free(pv); free(pe); free(heap)
    return value, error, npanels
