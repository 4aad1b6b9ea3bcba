"""Statistical helpers shared by the distribution tests."""

import numpy as np
from scipy import stats


def merge_bins(counts_list, expected, min_expected=5.0):
    """Merge adjacent support bins until every expected count reaches the
    floor chi-square needs. Returns merged copies of each counts array and
    of the expected array."""
    expected = np.asarray(expected, dtype=np.float64)
    groups = []
    start = 0
    acc = 0.0
    for i, e in enumerate(expected):
        acc += e
        if acc >= min_expected:
            groups.append((start, i + 1))
            start = i + 1
            acc = 0.0
    if start < len(expected):
        if groups:
            s, _ = groups.pop()
            groups.append((s, len(expected)))
        else:
            groups.append((0, len(expected)))
    merged_counts = [
        np.array([np.sum(c[s:e]) for s, e in groups], dtype=np.float64)
        for c in counts_list
    ]
    merged_expected = np.array([np.sum(expected[s:e]) for s, e in groups])
    return merged_counts, merged_expected


def gof_pvalue(samples, support_min, probs):
    """Chi-square goodness of fit of integer samples against an exact pmf."""
    samples = np.asarray(samples)
    n = samples.size
    shifted = samples - support_min
    counts = np.bincount(shifted, minlength=len(probs)).astype(np.float64)
    assert shifted.min() >= 0 and shifted.max() < len(probs), "sample outside support"
    (obs,), exp = merge_bins([counts], np.asarray(probs) * n)
    # renormalize away the pmf's float-level mass defect
    exp *= obs.sum() / exp.sum()
    return stats.chisquare(obs, exp).pvalue


def homogeneity_pvalue(samples_a, samples_b):
    """Chi-square two-sample homogeneity test for integer samples."""
    lo = min(samples_a.min(), samples_b.min())
    hi = max(samples_a.max(), samples_b.max())
    ca = np.bincount(samples_a - lo, minlength=hi - lo + 1).astype(np.float64)
    cb = np.bincount(samples_b - lo, minlength=hi - lo + 1).astype(np.float64)
    pooled = ca + cb
    (ma, mb), _ = merge_bins([ca, cb], pooled, min_expected=10.0)
    table = np.vstack([ma, mb])
    table = table[:, table.sum(axis=0) > 0]
    return stats.chi2_contingency(table).pvalue
