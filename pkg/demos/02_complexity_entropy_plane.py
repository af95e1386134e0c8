"""Where different dynamics land on the complexity-entropy plane.

White noise uses every pattern about equally (H near 1, C near 0), a
monotone ramp uses one pattern (H = C = 0). Chaotic maps and correlated noise
sit in between, with chaos showing the higher complexity at equal entropy.
"""

import numpy as np

from ordtraj import EmbeddingParams, extract_sequence, pattern_distribution
from ordtraj.quantifiers import quantifiers

rng = np.random.default_rng(0)
n = 20_000


def logistic(r, n, x0=0.4):
    x = np.empty(n)
    x[0] = x0
    for i in range(1, n):
        x[i] = r * x[i - 1] * (1 - x[i - 1])
    return x


def fgn_like(beta, n):
    """Power-law noise with spectrum 1/f^beta, shaped in the Fourier domain."""
    freqs = np.fft.rfftfreq(n)
    freqs[0] = freqs[1]
    spectrum = rng.normal(size=len(freqs)) + 1j * rng.normal(size=len(freqs))
    return np.fft.irfft(spectrum * freqs ** (-beta / 2), n)


signals = {
    "white noise": rng.normal(size=n),
    "1/f noise": fgn_like(1.0, n),
    "brown noise": np.cumsum(rng.normal(size=n)),
    "logistic r=4": logistic(4.0, n),
    "sine": np.sin(np.linspace(0, 60 * np.pi, n)),
    "ramp": np.arange(n, dtype=float),
}

for dim in (4, 6):
    params = EmbeddingParams(dim, 1)
    print(f"D={dim}")
    print(f"  {'signal':<14} {'H':>7} {'C':>7}")
    for name, x in signals.items():
        q = quantifiers(pattern_distribution(extract_sequence(x, params)))
        print(f"  {name:<14} {q.entropy:7.4f} {q.complexity:7.4f}")
    print()
