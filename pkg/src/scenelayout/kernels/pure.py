"""Pure NumPy implementations of the hot kernels.

Fallback backend used when the compiled extension is unavailable (see
``scenelayout.kernels``). Semantics are identical to ``_native``: exact
cross-correlation, first-in-scan-order max-pool ties, zero padding for
out-of-bounds sampling taps, align-corners resize.

All functions operate on channels-last float arrays (H x W x C) and
preserve the input dtype.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "pure"


def conv2d_forward(x, k, b, stride, pad):
    """Cross-correlate ``x`` (H,W,Ci) with ``k`` (kh,kw,Ci,Co), add bias."""
    kh, kw, ci, co = k.shape
    if pad:
        x = np.pad(x, ((pad, pad), (pad, pad), (0, 0)))
    cols, oh, ow = _im2col(x, kh, kw, stride)
    y = cols @ k.reshape(kh * kw * ci, co) + b
    return y.reshape(oh, ow, co)


def conv2d_backward(x, k, gy, stride, pad):
    """Gradients of conv2d w.r.t. input, kernel, and bias."""
    kh, kw, ci, co = k.shape
    h, w = x.shape[0], x.shape[1]
    xp = np.pad(x, ((pad, pad), (pad, pad), (0, 0))) if pad else x
    cols, oh, ow = _im2col(xp, kh, kw, stride)
    gy_flat = gy.reshape(oh * ow, co)

    gb = gy_flat.sum(axis=0)
    gk = (cols.T @ gy_flat).reshape(k.shape)

    gcols = (gy_flat @ k.reshape(kh * kw * ci, co).T).reshape(oh, ow, kh, kw, ci)
    gxp = np.zeros_like(xp)
    for ky in range(kh):
        for kx in range(kw):
            gxp[ky : ky + oh * stride : stride, kx : kx + ow * stride : stride] += gcols[:, :, ky, kx]
    gx = gxp[pad : pad + h, pad : pad + w] if pad else gxp
    return gx, gk, gb


def _im2col(xp, kh, kw, stride):
    hp, wp, ci = xp.shape
    oh = (hp - kh) // stride + 1
    ow = (wp - kw) // stride + 1
    win = np.lib.stride_tricks.sliding_window_view(xp, (kh, kw), axis=(0, 1))
    win = win[::stride, ::stride]  # (oh, ow, ci, kh, kw)
    cols = np.ascontiguousarray(win.transpose(0, 1, 3, 4, 2)).reshape(oh * ow, kh * kw * ci)
    return cols, oh, ow


def maxpool2_forward(x):
    """2x2 max pool; returns (output, argmax) with argmax in 0..3 scan order."""
    h, w, c = x.shape
    win = x.reshape(h // 2, 2, w // 2, 2, c).transpose(0, 2, 1, 3, 4).reshape(h // 2, w // 2, 4, c)
    arg = win.argmax(axis=2).astype(np.int64)  # first max in scan order
    y = np.take_along_axis(win, arg[:, :, None, :], axis=2)[:, :, 0, :]
    return y, arg


def maxpool2_backward(gy, arg, h, w):
    c = gy.shape[2]
    gwin = np.zeros((h // 2, w // 2, 4, c), dtype=gy.dtype)
    np.put_along_axis(gwin, arg[:, :, None, :], gy[:, :, None, :], axis=2)
    return gwin.reshape(h // 2, w // 2, 2, 2, c).transpose(0, 2, 1, 3, 4).reshape(h, w, c)


def _taps(px, py, h, w):
    x0 = np.floor(px)
    y0 = np.floor(py)
    wx = px - x0
    wy = py - y0
    x0 = x0.astype(np.int64)
    y0 = y0.astype(np.int64)
    taps = []
    for dy, dx, wgt in ((0, 0, (1 - wy) * (1 - wx)), (0, 1, (1 - wy) * wx), (1, 0, wy * (1 - wx)), (1, 1, wy * wx)):
        yy = y0 + dy
        xx = x0 + dx
        ok = (yy >= 0) & (yy < h) & (xx >= 0) & (xx < w)
        taps.append((np.where(ok, yy, 0), np.where(ok, xx, 0), wgt * ok))
    return taps, x0, y0, wx, wy


def grid_sample_forward(src, px, py):
    """Bilinear sample of ``src`` (H,W,C) at pixel coords; zero outside."""
    h, w, _ = src.shape
    taps, _, _, _, _ = _taps(px, py, h, w)
    out = np.zeros(px.shape + (src.shape[2],), dtype=src.dtype)
    for yy, xx, wgt in taps:
        out += wgt[:, :, None] * src[yy, xx]
    return out


def grid_sample_backward(src, px, py, gy):
    """Gradients of grid_sample w.r.t. source values and pixel coordinates."""
    h, w, _ = src.shape
    taps, x0, y0, wx, wy = _taps(px, py, h, w)
    gsrc = np.zeros_like(src)
    for yy, xx, wgt in taps:
        np.add.at(gsrc, (yy, xx), wgt[:, :, None] * gy)

    # d(out)/d(px) = (1-wy)*(v01-v00) + wy*(v11-v10), taps outside read zero
    vals = []
    for dy, dx in ((0, 0), (0, 1), (1, 0), (1, 1)):
        yy = y0 + dy
        xx = x0 + dx
        ok = (yy >= 0) & (yy < h) & (xx >= 0) & (xx < w)
        v = src[np.where(ok, yy, 0), np.where(ok, xx, 0)] * ok[:, :, None]
        vals.append(v)
    v00, v01, v10, v11 = vals
    gdot = gy  # (oh, ow, c)
    gpx = (((1 - wy)[:, :, None] * (v01 - v00) + wy[:, :, None] * (v11 - v10)) * gdot).sum(axis=2)
    gpy = (((1 - wx)[:, :, None] * (v10 - v00) + wx[:, :, None] * (v11 - v01)) * gdot).sum(axis=2)
    return gsrc, gpx, gpy


def _resize_coords(n_in, n_out, dtype):
    # j*(n_in-1)/(n_out-1): exact when n_out == n_in (quotient is integer)
    if n_out == 1:
        return np.zeros(1, dtype=dtype)
    j = np.arange(n_out, dtype=dtype)
    return j * dtype(n_in - 1) / dtype(n_out - 1)


def resize_bilinear_forward(src, oh, ow):
    """Align-corners bilinear resize of ``src`` (H,W,C) to (oh,ow,C)."""
    h, w, _ = src.shape
    dt = src.dtype.type
    px = np.broadcast_to(_resize_coords(w, ow, dt)[None, :], (oh, ow))
    py = np.broadcast_to(_resize_coords(h, oh, dt)[:, None], (oh, ow))
    return grid_sample_forward(src, np.ascontiguousarray(px), np.ascontiguousarray(py))


def resize_bilinear_backward(h, w, c, gy, dtype):
    oh, ow = gy.shape[0], gy.shape[1]
    dt = np.dtype(dtype).type
    px = np.ascontiguousarray(np.broadcast_to(_resize_coords(w, ow, dt)[None, :], (oh, ow)))
    py = np.ascontiguousarray(np.broadcast_to(_resize_coords(h, oh, dt)[:, None], (oh, ow)))
    src = np.zeros((h, w, c), dtype=dtype)
    gsrc, _, _ = grid_sample_backward(src, px, py, gy)
    return gsrc
