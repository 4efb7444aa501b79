"""Built-in graphons and experiment presets.

``example-sbm``
    five-block SBM on [0, .1, .4, .6, .9, 1];
``example-fr``
    the rank-two graphon (x^2 + y^2) / 2;
``example-wg``
    min(x, y) (1 - max(x, y)).
"""
import numpy as np

from .errors import ConfigError
from .expressions import Polynomial
from .graphon import AnalyticKernelGraphon, FiniteRankGraphon, Metadata, SBMGraphon, graphon_from_dict, load_graphon

SBM_BOUNDARIES = (0.0, 0.1, 0.4, 0.6, 0.9, 1.0)
SBM_P = (
    (1.0, 1.0, 1.0, 0.0, 0.0),
    (1.0, 0.5, 0.0, 0.0, 0.0),
    (1.0, 0.0, 0.25, 0.0, 1.0),
    (0.0, 0.0, 0.0, 0.5, 1.0),
    (0.0, 0.0, 1.0, 1.0, 1.0),
)


def example_sbm():
    # eta is the smallest block degree, 0.25
    md = Metadata(lipschitz_L=0.0, breakpoints=SBM_BOUNDARIES[1:-1], eta=0.25)
    return SBMGraphon(SBM_BOUNDARIES, SBM_P, md, name="example-sbm")


def example_fr():
    # degree is x^2/2 + 1/6 >= 1/6; |dW/dx| = x <= 1
    g = [Polynomial((0.0, 0.0, 1.0)), Polynomial((0.5,))]
    h = [Polynomial((0.5,)), Polynomial((0.0, 0.0, 1.0))]
    return FiniteRankGraphon(g, h, Metadata(lipschitz_L=1.0, eta=1.0 / 6.0), name="example-fr")


def example_wg():
    return AnalyticKernelGraphon("min(x, y) * (1 - max(x, y))", Metadata(lipschitz_L=1.0), name="example-wg", builtin="minmax")


def constant_sbm(p):
    return SBMGraphon([0.0, 1.0], [[p]], Metadata(eta=p), name=f"constant-{p:g}")


def constant_kernel(p):
    return AnalyticKernelGraphon(repr(float(p)), Metadata(eta=p), name=f"constant-{p:g}")


GRAPHONS = {
    "example-sbm": example_sbm,
    "example-fr": example_fr,
    "example-wg": example_wg,
}


def resolve_graphon(ref):
    """A built-in name, ``constant:p``, a path to a JSON file, or a parsed document."""
    if isinstance(ref, dict):
        return graphon_from_dict(ref)
    if ref in GRAPHONS:
        return GRAPHONS[ref]()
    if isinstance(ref, str) and ref.startswith("constant:"):
        try:
            p = float(ref.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad constant graphon {ref!r}") from None
        return constant_sbm(p)
    return load_graphon(ref)


# Sample sizes roughly log-spaced between the captioned extremes.
FIG4_N = (68, 100, 147, 216, 318, 489, 720)
# Pairs of a misaligned N and a nearby multiple of 10.
FIG5_N = (58, 60, 73, 80, 107, 110, 143, 150, 197, 200, 283, 290, 397, 400, 563, 570, 787, 790, 953, 960)

EXPERIMENTS = {
    "fig4": {
        "graphon": "example-fr",
        "kind": "eigenvector",
        "N": list(FIG4_N),
        "seeds": 20,
        "mode": "deterministic",
        "tau": 0.0,
        "master_seed": 4,
    },
    "fig5": {
        "graphon": "example-sbm",
        "kind": "katz",
        "alpha": 1.5,
        "N": list(FIG5_N),
        "seeds": 20,
        "mode": "deterministic",
        "tau": 0.0,
        "master_seed": 5,
    },
}


def experiment(name):
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown preset {name!r}; available: {sorted(EXPERIMENTS)}")
    return dict(EXPERIMENTS[name])


def log_spaced(lo, hi, count):
    return sorted({int(round(v)) for v in np.geomspace(lo, hi, count)})
