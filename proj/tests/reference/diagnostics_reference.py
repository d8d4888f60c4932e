# Rank-normalized split R-hat and bulk ESS (Vehtari et al. 2021 definitions,
# Stan's Geyer truncation) computed with numpy/scipy on a deterministic input
# that the C++ test regenerates with the same formula.
# Run: python3 tests/reference/diagnostics_reference.py
import numpy as np
from scipy.stats import norm, rankdata

n, m = 101, 3
i = np.arange(n)
chains = np.stack([np.sin(0.7 * i + c) + 0.013 * i * (c + 1) + 0.5 * np.cos(1.9 * i * (c + 2)) for c in range(m)], axis=1)


def split(x):
    h = x.shape[0] // 2
    return np.concatenate([x[:h], x[x.shape[0] - h:]], axis=1)


def rank_norm(x):
    r = rankdata(x.ravel(), method="average").reshape(x.shape)
    return norm.ppf((r - 0.375) / (x.size + 0.25))


def rhat(x):
    n = x.shape[0]
    w = x.var(axis=0, ddof=1).mean()
    b = n * x.mean(axis=0).var(ddof=1)
    return np.sqrt(((n - 1) / n * w + b / n) / w)


def autocov(v):
    n = len(v)
    c = v - v.mean()
    f = np.fft.fft(c, 2 * n)
    return np.fft.ifft(f * np.conj(f))[:n].real / n


def ess(x):
    n, m = x.shape
    acov = np.stack([autocov(x[:, c]) for c in range(m)], axis=1)
    mean_var = (acov[0] * n / (n - 1)).mean()
    var_plus = mean_var * (n - 1) / n + x.mean(axis=0).var(ddof=1)
    rho = np.zeros(n)
    even, odd = 1.0, 1 - (mean_var - acov[1].mean()) / var_plus
    rho[0], rho[1] = even, odd
    t = 1
    while t < n - 5 and even + odd > 0:
        even = 1 - (mean_var - acov[t + 1].mean()) / var_plus
        odd = 1 - (mean_var - acov[t + 2].mean()) / var_plus
        if even + odd >= 0:
            rho[t + 1], rho[t + 2] = even, odd
        t += 2
    max_t = t
    if even > 0:
        rho[max_t + 1] = even
    t = 1
    while t <= max_t - 2:
        if rho[t + 1] + rho[t + 2] > rho[t - 1] + rho[t]:
            rho[t + 1] = rho[t + 2] = (rho[t - 1] + rho[t]) / 2
        t += 2
    tau = -1 + 2 * rho[: max_t + 1].sum() + rho[max_t + 1]
    tau = max(tau, 1 / np.log10(n * m))
    return n * m / tau


s = split(chains)
bulk = rhat(rank_norm(s))
tail = rhat(rank_norm(np.abs(s - np.median(s))))
print("rhat_bulk  %.17g" % bulk)
print("rhat_tail  %.17g" % tail)
print("split_rhat %.17g" % max(bulk, tail))
print("ess_bulk   %.17g" % ess(rank_norm(s)))
print("ess_raw    %.17g" % ess(s))
print("rhat_plain %.17g" % rhat(chains))
