# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Dense simplex pivot loop, compiled backend.

Keep in lockstep with ``_simplex_py.run_simplex``: same pivot choices, same
elementwise arithmetic (build with -ffp-contract=off so results match the
numpy backend bit for bit).
"""

from libc.math cimport INFINITY

STATUS_OPTIMAL = 0
STATUS_UNBOUNDED = 1
STATUS_ITER_LIMIT = 2


def run_simplex(double[:, ::1] tableau, Py_ssize_t[::1] basis, Py_ssize_t n_eligible,
                double tol_entering, double tol_pivot, Py_ssize_t stall_limit,
                Py_ssize_t max_iter):
    """Pivot the tableau to optimality in place; returns (status, iterations)."""
    cdef Py_ssize_t m = tableau.shape[0] - 1
    cdef Py_ssize_t ncols = tableau.shape[1]
    cdef Py_ssize_t rhs = ncols - 1
    cdef bint bland = False
    cdef Py_ssize_t stall = 0
    cdef double last_obj = tableau[m, rhs]
    cdef Py_ssize_t iters = 0
    cdef Py_ssize_t pc, pr, i, j, bbest
    cdef double cmin, ratio, best, piv, f, obj, absobj

    while True:
        # entering column
        pc = -1
        if bland:
            for j in range(n_eligible):
                if tableau[m, j] < -tol_entering:
                    pc = j
                    break
            if pc < 0:
                return STATUS_OPTIMAL, iters
        else:
            pc = 0
            cmin = tableau[m, 0]
            for j in range(1, n_eligible):
                if tableau[m, j] < cmin:
                    cmin = tableau[m, j]
                    pc = j
            if cmin >= -tol_entering:
                return STATUS_OPTIMAL, iters

        # ratio test: lowest row index at the minimum ratio; in Bland mode the
        # tie goes to the smallest basic-variable index instead
        best = INFINITY
        pr = -1
        for i in range(m):
            if tableau[i, pc] > tol_pivot:
                ratio = tableau[i, rhs] / tableau[i, pc]
                if ratio < best:
                    best = ratio
                    pr = i
        if pr < 0:
            return STATUS_UNBOUNDED, iters
        if bland:
            bbest = basis[pr]
            for i in range(m):
                if tableau[i, pc] > tol_pivot and tableau[i, rhs] / tableau[i, pc] == best \
                        and basis[i] < bbest:
                    bbest = basis[i]
                    pr = i

        piv = tableau[pr, pc]
        for j in range(ncols):
            tableau[pr, j] /= piv
        for i in range(m + 1):
            if i == pr:
                continue
            f = tableau[i, pc]
            if f != 0.0:
                for j in range(ncols):
                    tableau[i, j] -= f * tableau[pr, j]
        for i in range(m + 1):
            tableau[i, pc] = 0.0
        tableau[pr, pc] = 1.0
        basis[pr] = pc
        iters += 1
        if iters >= max_iter:
            return STATUS_ITER_LIMIT, iters

        obj = tableau[m, rhs]
        if not bland:
            absobj = last_obj if last_obj >= 0.0 else -last_obj
            if obj <= last_obj + 1e-12 * (1.0 + absobj):
                stall += 1
                if stall >= stall_limit:
                    bland = True
            else:
                stall = 0
        last_obj = obj
