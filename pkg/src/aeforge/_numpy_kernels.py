"""Pure-numpy convolution kernels (im2col + BLAS).

Forward and weight-gradient use windowed tensordot, processed in batch
chunks sized so the materialized column block stays cache-resident.
Narrow-output convolutions (Cout*kh*kw <= Cin, stride 1) instead use a
per-tap GEMM on the padded input, which skips the im2col copy entirely.
Input gradients reuse the forward kernel with flipped weights at stride
1 and fall back to a per-tap scatter for strided convolutions.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

# target elements per materialized column chunk (~16 MB in float32)
_CHUNK_ELEMS = 4_000_000


def _pad(x, pad):
    if pad == 0:
        return x
    return np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))


def _out_hw(h, w, kh, kw, stride, pad):
    return (h + 2 * pad - kh) // stride + 1, (w + 2 * pad - kw) // stride + 1


def _windows(xp, kh, kw, stride):
    win = sliding_window_view(xp, (kh, kw), axis=(2, 3))
    return win[:, :, ::stride, ::stride]


def _chunk_size(cin, kh, kw, ho, wo):
    per_sample = cin * kh * kw * ho * wo
    return max(1, _CHUNK_ELEMS // max(1, per_sample))


def conv2d_forward(x, w, b, stride, pad):
    n, cin, h, wd = x.shape
    cout, _, kh, kw = w.shape
    ho, wo = _out_hw(h, wd, kh, kw, stride, pad)
    xp = _pad(x, pad)

    if stride == 1 and cout * kh * kw <= cin:
        # tap GEMM: one matmul against the flat padded image per kernel tap
        hp, wp = xp.shape[2], xp.shape[3]
        xflat = np.ascontiguousarray(xp.transpose(1, 0, 2, 3)).reshape(cin, -1)
        wall = np.ascontiguousarray(
            w.transpose(2, 3, 0, 1).reshape(kh * kw * cout, cin)
        )
        z = (wall @ xflat).reshape(kh, kw, cout, n, hp, wp)
        acc = np.zeros((cout, n, ho, wo), dtype=x.dtype)
        for ky in range(kh):
            for kx in range(kw):
                acc += z[ky, kx, :, :, ky:ky + ho, kx:kx + wo]
        acc += b[:, None, None, None]
        return np.ascontiguousarray(acc.transpose(1, 0, 2, 3))

    out = np.empty((n, cout, ho, wo), dtype=x.dtype)
    step = _chunk_size(cin, kh, kw, ho, wo)
    for i0 in range(0, n, step):
        win = _windows(xp[i0:i0 + step], kh, kw, stride)
        o = np.tensordot(win, w, axes=([1, 4, 5], [1, 2, 3]))
        out[i0:i0 + step] = o.transpose(0, 3, 1, 2)
    out += b[None, :, None, None]
    return out


def conv2d_grad_input(gout, w, x_shape, stride, pad):
    n, cin, h, wd = x_shape
    cout, _, kh, kw = w.shape
    ho, wo = gout.shape[2], gout.shape[3]

    if stride == 1 and kh == kw and kh - 1 - pad >= 0:
        # full correlation with spatially flipped, channel-swapped weights
        wf = np.ascontiguousarray(w[:, :, ::-1, ::-1].swapaxes(0, 1))
        zero_b = np.zeros(cin, dtype=gout.dtype)
        return conv2d_forward(gout, wf, zero_b, 1, kh - 1 - pad)

    gxp = np.zeros((n, cin, h + 2 * pad, wd + 2 * pad), dtype=gout.dtype)
    for ky in range(kh):
        for kx in range(kw):
            contrib = np.tensordot(gout, w[:, :, ky, kx], axes=([1], [0]))
            gxp[:, :, ky:ky + stride * ho:stride, kx:kx + stride * wo:stride] += (
                contrib.transpose(0, 3, 1, 2)
            )
    if pad == 0:
        return gxp
    return np.ascontiguousarray(gxp[:, :, pad:pad + h, pad:pad + wd])


def conv2d_grad_weight(gout, x, w_shape, stride, pad):
    cout, cin, kh, kw = w_shape
    n = x.shape[0]
    ho, wo = gout.shape[2], gout.shape[3]
    xp = _pad(x, pad)
    gw = np.zeros(w_shape, dtype=gout.dtype)
    step = _chunk_size(cin, kh, kw, ho, wo)
    for i0 in range(0, n, step):
        win = _windows(xp[i0:i0 + step], kh, kw, stride)
        gw += np.tensordot(gout[i0:i0 + step], win, axes=([0, 2, 3], [0, 2, 3]))
    return gw
