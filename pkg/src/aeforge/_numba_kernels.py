"""Numba-jitted direct convolution kernels.

Loops are parallelized over independent output slices only, so results
are bit-identical regardless of thread count. 3x3 kernels (the entire
model zoo here) get an unrolled row-accumulator kernel; anything else
falls through to a generic loop. fastmath is enabled for SIMD: the two
backends agree to float rounding, not bitwise.
"""

import os

import numba
import numpy as np
from numba import njit, prange

_cap = os.environ.get("AEFORGE_THREADS", "").strip()
if _cap:
    numba.set_num_threads(max(1, min(int(_cap), numba.config.NUMBA_NUM_THREADS)))


def _pad(x, pad):
    if pad == 0:
        return np.ascontiguousarray(x)
    return np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))


def _out_hw(h, w, kh, kw, stride, pad):
    return (h + 2 * pad - kh) // stride + 1, (w + 2 * pad - kw) // stride + 1


@njit(parallel=True, fastmath=True, cache=True)
def _fwd_3x3(xp, w, b, stride, ho, wo):
    n, cin = xp.shape[0], xp.shape[1]
    cout = w.shape[0]
    out = np.empty((n, cout, ho, wo), dtype=xp.dtype)
    for idx in prange(n * cout * ho):
        i = idx // (cout * ho)
        rem = idx % (cout * ho)
        oc = rem // ho
        oy = rem % ho
        acc = np.zeros(wo, dtype=xp.dtype)
        iy0 = oy * stride
        for ic in range(cin):
            xr0 = xp[i, ic, iy0]
            xr1 = xp[i, ic, iy0 + 1]
            xr2 = xp[i, ic, iy0 + 2]
            w0 = w[oc, ic, 0]
            w1 = w[oc, ic, 1]
            w2 = w[oc, ic, 2]
            for ox in range(wo):
                ix = ox * stride
                acc[ox] += (w0[0] * xr0[ix] + w0[1] * xr0[ix + 1] + w0[2] * xr0[ix + 2]
                            + w1[0] * xr1[ix] + w1[1] * xr1[ix + 1] + w1[2] * xr1[ix + 2]
                            + w2[0] * xr2[ix] + w2[1] * xr2[ix + 1] + w2[2] * xr2[ix + 2])
        for ox in range(wo):
            out[i, oc, oy, ox] = acc[ox] + b[oc]
    return out


@njit(parallel=True, fastmath=True, cache=True)
def _fwd_generic(xp, w, b, stride, ho, wo):
    n, cin = xp.shape[0], xp.shape[1]
    cout, _, kh, kw = w.shape
    out = np.empty((n, cout, ho, wo), dtype=xp.dtype)
    for idx in prange(n * cout * ho):
        i = idx // (cout * ho)
        rem = idx % (cout * ho)
        oc = rem // ho
        oy = rem % ho
        acc = np.zeros(wo, dtype=xp.dtype)
        iy0 = oy * stride
        for ic in range(cin):
            for ky in range(kh):
                xr = xp[i, ic, iy0 + ky]
                for kx in range(kw):
                    wv = w[oc, ic, ky, kx]
                    for ox in range(wo):
                        acc[ox] += wv * xr[ox * stride + kx]
        for ox in range(wo):
            out[i, oc, oy, ox] = acc[ox] + b[oc]
    return out


@njit(parallel=True, fastmath=True, cache=True)
def _grad_input(gout, w, gxp, stride):
    n, cout, ho, wo = gout.shape
    cin, kh, kw = w.shape[1], w.shape[2], w.shape[3]
    for i in prange(n):
        for oc in range(cout):
            for oy in range(ho):
                iy0 = oy * stride
                for ox in range(wo):
                    g = gout[i, oc, oy, ox]
                    ix0 = ox * stride
                    for ic in range(cin):
                        for ky in range(kh):
                            for kx in range(kw):
                                gxp[i, ic, iy0 + ky, ix0 + kx] += g * w[oc, ic, ky, kx]


@njit(parallel=True, fastmath=True, cache=True)
def _grad_weight(gout, xp, gw, stride):
    n, cout, ho, wo = gout.shape
    cin, kh, kw = gw.shape[1], gw.shape[2], gw.shape[3]
    for oc in prange(cout):
        for i in range(n):
            for oy in range(ho):
                iy0 = oy * stride
                for ox in range(wo):
                    g = gout[i, oc, oy, ox]
                    ix0 = ox * stride
                    for ic in range(cin):
                        for ky in range(kh):
                            for kx in range(kw):
                                gw[oc, ic, ky, kx] += g * xp[i, ic, iy0 + ky, ix0 + kx]


def conv2d_forward(x, w, b, stride, pad):
    kh, kw = w.shape[2], w.shape[3]
    ho, wo = _out_hw(x.shape[2], x.shape[3], kh, kw, stride, pad)
    xp = _pad(x, pad)
    w = np.ascontiguousarray(w)
    if kh == 3 and kw == 3:
        return _fwd_3x3(xp, w, b, stride, ho, wo)
    return _fwd_generic(xp, w, b, stride, ho, wo)


def conv2d_grad_input(gout, w, x_shape, stride, pad):
    n, cin, h, wd = x_shape
    gxp = np.zeros((n, cin, h + 2 * pad, wd + 2 * pad), dtype=gout.dtype)
    _grad_input(np.ascontiguousarray(gout), np.ascontiguousarray(w), gxp, stride)
    if pad == 0:
        return gxp
    return np.ascontiguousarray(gxp[:, :, pad:pad + h, pad:pad + wd])


def conv2d_grad_weight(gout, x, w_shape, stride, pad):
    gw = np.zeros(w_shape, dtype=gout.dtype)
    _grad_weight(np.ascontiguousarray(gout), _pad(x, pad), gw, stride)
    return gw
