"""Independent reference implementations used as test oracles.

Nothing here imports the package's kernels or metric code: these are
straight-line, loop-based versions of the math, kept deliberately dumb.
"""

import math

import numpy as np


def conv2d_reference(x, w, b, stride, pad):
    """Nested-loop cross-correlation in float64."""
    n, cin, h, wd = x.shape
    cout, _, kh, kw = w.shape
    ho = (h + 2 * pad - kh) // stride + 1
    wo = (wd + 2 * pad - kw) // stride + 1
    out = np.zeros((n, cout, ho, wo), dtype=np.float64)
    for i in range(n):
        for oc in range(cout):
            for oy in range(ho):
                for ox in range(wo):
                    acc = float(b[oc])
                    for ic in range(cin):
                        for ky in range(kh):
                            for kx in range(kw):
                                iy = oy * stride + ky - pad
                                ix = ox * stride + kx - pad
                                if 0 <= iy < h and 0 <= ix < wd:
                                    acc += float(x[i, ic, iy, ix]) * float(w[oc, ic, ky, kx])
                    out[i, oc, oy, ox] = acc
    return out


def central_diff(make_loss, arr, h=1e-4):
    """Central finite differences of a scalar loss w.r.t. arr, in place."""
    grad = np.zeros_like(arr, dtype=np.float64)
    flat = arr.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        old = flat[i]
        flat[i] = old + h
        fp = make_loss()
        flat[i] = old - h
        fm = make_loss()
        flat[i] = old
        gflat[i] = (fp - fm) / (2 * h)
    return grad


def central_diff_sampled(make_loss, arr, indices, h=1e-4):
    """Central differences at a subset of flat indices."""
    flat = arr.reshape(-1)
    out = np.zeros(len(indices), dtype=np.float64)
    for j, i in enumerate(indices):
        old = flat[i]
        flat[i] = old + h
        fp = make_loss()
        flat[i] = old - h
        fm = make_loss()
        flat[i] = old
        out[j] = (fp - fm) / (2 * h)
    return out


def rel_err(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1.0)
    return float(np.max(np.abs(a - b) / denom))


def adamw_scalar_reference(theta, grads, lrs, wd, b1=0.9, b2=0.999, eps=1e-8):
    """Straight-line decoupled AdamW on one scalar."""
    m = 0.0
    v = 0.0
    for t, (g, lr) in enumerate(zip(grads, lrs), start=1):
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        theta = theta * (1 - lr * wd)
        theta = theta - lr * (m / (1 - b1 ** t)) / (math.sqrt(v / (1 - b2 ** t)) + eps)
    return theta


def dct2_reference(block):
    """8x8 orthonormal 2-D DCT-II by quadruple loop."""
    out = np.zeros((8, 8), dtype=np.float64)
    for u in range(8):
        cu = math.sqrt(1 / 8) if u == 0 else math.sqrt(2 / 8)
        for v in range(8):
            cv = math.sqrt(1 / 8) if v == 0 else math.sqrt(2 / 8)
            s = 0.0
            for y in range(8):
                for x in range(8):
                    s += (block[y, x]
                          * math.cos((2 * y + 1) * u * math.pi / 16)
                          * math.cos((2 * x + 1) * v * math.pi / 16))
            out[u, v] = cu * cv * s
    return out


def idct2_reference(coeff):
    out = np.zeros((8, 8), dtype=np.float64)
    for y in range(8):
        for x in range(8):
            s = 0.0
            for u in range(8):
                cu = math.sqrt(1 / 8) if u == 0 else math.sqrt(2 / 8)
                for v in range(8):
                    cv = math.sqrt(1 / 8) if v == 0 else math.sqrt(2 / 8)
                    s += (cu * cv * coeff[u, v]
                          * math.cos((2 * y + 1) * u * math.pi / 16)
                          * math.cos((2 * x + 1) * v * math.pi / 16))
            out[y, x] = s
    return out


def round_half_away_scalar(x):
    return math.copysign(math.floor(abs(x) + 0.5), x)


def jpeg_plane_reference(plane, table):
    """One 8x8-multiple plane through level shift, DCT, quantize, IDCT."""
    h, w = plane.shape
    out = np.zeros_like(plane, dtype=np.float64)
    for by in range(h // 8):
        for bx in range(w // 8):
            block = plane[by * 8:by * 8 + 8, bx * 8:bx * 8 + 8] - 128.0
            coeff = dct2_reference(block)
            q = np.zeros((8, 8))
            for u in range(8):
                for v in range(8):
                    q[u, v] = round_half_away_scalar(coeff[u, v] / table[u, v]) * table[u, v]
            out[by * 8:by * 8 + 8, bx * 8:bx * 8 + 8] = idct2_reference(q) + 128.0
    return out


def bilinear_reference(pixels, scale, out_h, out_w):
    """Per-pixel bilinear with half-pixel centers, float64."""
    h, w, _ = pixels.shape
    out = np.zeros((out_h, out_w, 3), dtype=np.uint8)
    for oy in range(out_h):
        sy = min(max((oy + 0.5) / scale - 0.5, 0.0), h - 1)
        y0 = int(math.floor(sy))
        y1 = min(y0 + 1, h - 1)
        fy = sy - y0
        for ox in range(out_w):
            sx = min(max((ox + 0.5) / scale - 0.5, 0.0), w - 1)
            x0 = int(math.floor(sx))
            x1 = min(x0 + 1, w - 1)
            fx = sx - x0
            for c in range(3):
                top = pixels[y0, x0, c] * (1 - fx) + pixels[y0, x1, c] * fx
                bot = pixels[y1, x0, c] * (1 - fx) + pixels[y1, x1, c] * fx
                out[oy, ox, c] = int(round_half_away_scalar(top * (1 - fy) + bot * fy))
    return out


def auc_pair_reference(pos, neg):
    """Mann-Whitney pair counting with half credit for ties."""
    pos = np.asarray(pos, dtype=np.float64)[:, None]
    neg = np.asarray(neg, dtype=np.float64)[None, :]
    wins = np.sum(pos > neg)
    ties = np.sum(pos == neg)
    return (wins + 0.5 * ties) / (pos.size * neg.size)


def tpr_at_fpr_reference(pos, neg, cap):
    """Exhaustive threshold enumeration with strict > decisions."""
    pos = np.asarray(pos, dtype=np.float64)
    neg = np.asarray(neg, dtype=np.float64)
    candidates = np.concatenate([np.unique(np.concatenate([pos, neg])),
                                 [min(pos.min(), neg.min()) - 1.0]])
    best = 0.0
    for t in candidates:
        fpr = np.mean(neg > t)
        if fpr <= cap:
            best = max(best, float(np.mean(pos > t)))
    return best
